// Copyright 2026 The advtopk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "advtopk/cli.h"

namespace advtopk {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = CliMain(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "advtopk_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("gen then rank") {
  const auto obs = Scratch("obs.txt").string();
  const Run g = Cli({"gen", "--n", "30", "--L", "40", "--eta", "0.8", "--k",
                     "3", "--delta-k", "0.3", "--seed", "5", "--out", obs});
  REQUIRE(g.code == kExitOk);
  const Run r = Cli({"rank", "--input", obs, "--eta", "0.8", "--k", "3"});
  CHECK(r.code == kExitOk);
  std::istringstream is(r.out);
  std::vector<int> top;
  for (int v; is >> v;) top.push_back(v);
  CHECK(top.size() == 3);

  const auto trace = Scratch("trace.csv").string();
  CHECK(Cli({"rank", "--input", obs, "--k", "3", "--trace", trace}).code ==
        kExitOk);
  CHECK(Slurp(trace).rfind("t,replaced_count,max_change,threshold", 0) == 0);
}

TEST_CASE("gen is seed-deterministic") {
  const Run a = Cli({"gen", "--n", "12", "--L", "5", "--seed", "9"});
  const Run b = Cli({"gen", "--n", "12", "--L", "5", "--seed", "9"});
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("observations n=12", 0) == 0);
}

TEST_CASE("estimate-eta from worker CSV") {
  const auto csv = Scratch("workers.csv").string();
  REQUIRE(Cli({"gen", "--n", "5", "--p", "1", "--eta", "0.8", "--workers",
               "4000", "--seed", "3", "--out", csv})
              .code == kExitOk);
  const Run r = Cli({"estimate-eta", "--input", csv, "--method", "both"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("method,eta_hat,sigma1,sigma2,mu,residual,degenerate,"
                    "clamped\n",
                    0) == 0);
}

TEST_CASE("bounds table") {
  const Run r = Cli({"bounds", "--n", "1000", "--k", "10", "--eta", "0.75",
                     "--delta-k", "0.4", "--p", "auto"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("scaling_known") != std::string::npos);
  CHECK(r.out.find("fano_bound") != std::string::npos);
  const auto csv = Scratch("bounds.csv").string();
  CHECK(Cli({"bounds", "--out", csv}).code == kExitOk);
  CHECK(Slurp(csv).rfind("n,K,p,L,eta,", 0) == 0);
}

TEST_CASE("small sweeps run") {
  const Run se = Cli({"sweep-eta", "--n", "30", "--k", "3", "--trials", "2",
                      "--eta-grid", "0.8", "--delta-k-grid", "0.3", "--L",
                      "20"});
  CHECK(se.code == kExitOk);
  CHECK(se.out.rfind("eta,delta_k,L,s_norm", 0) == 0);
  const Run ss = Cli({"sweep-samples", "--n", "30", "--k", "3", "--trials",
                      "2", "--eta-grid", "0.8", "--s-norm-grid", "1,2"});
  CHECK(ss.code == kExitOk);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(Cli({}).code == kExitUsage);
  CHECK(Cli({"no-such-command"}).code == kExitUsage);
  CHECK(Cli({"rank"}).code == kExitUsage);  // missing --input
  CHECK(Cli({"bounds", "--bogus"}).code == kExitUsage);
  CHECK(Cli({"bounds", "--eta", "0.5"}).code == kExitUsage);
  CHECK(Cli({"gen", "--n", "10", "--delta-k", "0.9"}).code == kExitUsage);
  CHECK(Cli({"rank", "--input", Scratch("missing.txt").string()}).code ==
        kExitUsage);
}

TEST_CASE("runtime failures exit with 2") {
  // Too few workers to split the sample.
  const auto csv = Scratch("one_worker.csv").string();
  {
    std::ofstream f(csv);
    f << "worker,0>1,1>0,0>2,2>0\n0,1,0,0,1\n";
  }
  CHECK(Cli({"estimate-eta", "--input", csv}).code == kExitRuntime);
}

TEST_CASE("help exits cleanly") {
  const Run r = Cli({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("sweep-samples") != std::string::npos);
}

}  // namespace
}  // namespace advtopk
