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

#include "advtopk/cli.h"

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include "advtopk/bounds.h"
#include "advtopk/core_model.h"
#include "advtopk/errors.h"
#include "advtopk/eta_estimation.h"
#include "advtopk/experiment.h"
#include "advtopk/mle_refinement.h"
#include "advtopk/spectral_ranking.h"
#include "advtopk/text_io.h"

namespace advtopk {
namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  bool paper_scale = false;
};

void AddCommon(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "64-bit random seed")->capture_default_str();
  sub->add_option("--out", c.out, "output path (default: stdout)");
  sub->add_flag("--paper-scale", c.paper_scale,
                "n = 1000, K = 10, trials = 1000 unless given explicitly");
}

// Either the --out file or the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }
  void Finish() {
    os_->flush();
    if (!*os_) throw Error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  return in;
}

double ResolveP(const std::string& text, int n) {
  if (text == "auto") return DefaultEdgeProbability(n);
  return ParseDouble(text);
}

// Applies --paper-scale defaults to options the user did not set.
template <typename T>
void ScaleDefault(CLI::App* sub, const Common& c, const char* flag, T& value,
                  T paper) {
  if (c.paper_scale && sub->count(flag) == 0) value = paper;
}

struct SweepFlags {
  int n = 200;
  int K = 5;
  std::string p = "auto";
  int trials = 200;
  int threads = 0;
  double w_min = 0.5;
  double w_max = 1.0;
  std::string mode = "known";
  int cap = kDefaultTensorCap;
};

void AddSweepFlags(CLI::App* sub, SweepFlags& f) {
  sub->add_option("--n", f.n, "number of items")->capture_default_str();
  sub->add_option("--k", f.K, "size of the top set")->capture_default_str();
  sub->add_option("--p", f.p, "edge probability or 'auto' (6 log n / n)")
      ->capture_default_str();
  sub->add_option("--trials", f.trials, "Monte Carlo trials per point")
      ->capture_default_str();
  sub->add_option("--threads", f.threads, "worker threads (0: all cores)")
      ->capture_default_str();
  sub->add_option("--w-min", f.w_min)->capture_default_str();
  sub->add_option("--w-max", f.w_max)->capture_default_str();
  sub->add_option("--mode", f.mode, "known | unknown")
      ->check(CLI::IsMember({"known", "unknown"}))
      ->capture_default_str();
  sub->add_option("--cap", f.cap, "tensor size cap (unknown mode)")
      ->capture_default_str();
}

SweepConfig MakeSweepConfig(CLI::App* sub, const Common& c, SweepFlags f) {
  ScaleDefault(sub, c, "--n", f.n, 1000);
  ScaleDefault(sub, c, "--k", f.K, 10);
  ScaleDefault(sub, c, "--trials", f.trials, 1000);
  SweepConfig cfg;
  cfg.n = f.n;
  cfg.K = f.K;
  cfg.p = ResolveP(f.p, f.n);
  cfg.range = {f.w_min, f.w_max};
  cfg.trials = f.trials;
  cfg.threads = f.threads;
  cfg.seed = c.seed;
  cfg.mode = f.mode == "unknown" ? PipelineMode::kUnknownEta
                                 : PipelineMode::kKnownEta;
  cfg.tensor_cap = f.cap;
  return cfg;
}

std::string JoinIndices(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s.push_back(' ');
    s += std::to_string(v[k]);
  }
  return s;
}

}  // namespace

int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Top-K ranking from pairwise comparisons under an adversarial "
               "BTL mixture"};
  app.name("advtopk");
  app.require_subcommand(1);
  std::function<void()> run;

  // gen
  Common gen_c;
  struct {
    int n = 200;
    std::string p = "auto";
    std::int64_t L = 10;
    double eta = 1.0;
    double w_min = 0.5;
    double w_max = 1.0;
    int K = 5;
    std::optional<double> delta_k;
    int workers = 0;
    std::string scores_out;
    std::string graph_out;
  } gen;
  auto* gen_cmd = app.add_subcommand(
      "gen", "generate scores, a comparison graph and observations");
  AddCommon(gen_cmd, gen_c);
  gen_cmd->add_option("--n", gen.n)->capture_default_str();
  gen_cmd->add_option("--p", gen.p, "edge probability or 'auto'")
      ->capture_default_str();
  gen_cmd->add_option("--L", gen.L, "samples per edge")->capture_default_str();
  gen_cmd->add_option("--eta", gen.eta)->capture_default_str();
  gen_cmd->add_option("--w-min", gen.w_min)->capture_default_str();
  gen_cmd->add_option("--w-max", gen.w_max)->capture_default_str();
  gen_cmd->add_option("--k", gen.K, "K used with --delta-k")
      ->capture_default_str();
  gen_cmd->add_option("--delta-k", gen.delta_k,
                      "impose this K/K+1 separation on the scores");
  gen_cmd->add_option("--workers", gen.workers,
                      "write worker-level responses (CSV) instead");
  gen_cmd->add_option("--scores-out", gen.scores_out);
  gen_cmd->add_option("--graph-out", gen.graph_out);
  gen_cmd->callback([&] {
    run = [&] {
      ScaleDefault(gen_cmd, gen_c, "--n", gen.n, 1000);
      ScaleDefault(gen_cmd, gen_c, "--k", gen.K, 10);
      ScoreVector w =
          GenerateScores(gen.n, {gen.w_min, gen.w_max}, gen_c.seed);
      if (gen.delta_k) w = ImposeSeparation(w, gen.K, *gen.delta_k);
      const ComparisonGraph g =
          GenerateErGraph(gen.n, ResolveP(gen.p, gen.n), gen_c.seed);
      if (g.below_connectivity_threshold()) {
        err << "warning: p <= log(n)/n; the graph is likely disconnected\n";
      }
      if (!gen.scores_out.empty()) {
        Sink s(gen.scores_out, out);
        WriteScores(*s, w);
        s.Finish();
      }
      if (!gen.graph_out.empty()) {
        Sink s(gen.graph_out, out);
        WriteGraph(*s, g);
        s.Finish();
      }
      Sink sink(gen_c.out, out);
      if (gen.workers > 0) {
        WriteWorkerCsv(*sink, SampleWorkerResponses(w, g, gen.eta, gen.workers,
                                                    gen_c.seed));
      } else {
        const auto batch =
            SampleObservations(w, g, MixtureParams(gen.eta), gen.L, gen_c.seed);
        WriteObservations(*sink, g, batch, gen.eta);
      }
      sink.Finish();
    };
  });

  // rank
  Common rank_c;
  struct {
    std::string input;
    std::optional<double> eta;
    int K = 5;
    std::optional<int> T;
    double c = 1.0;
    std::string threshold = "known";
    double w_min = 0.5;
    double w_max = 1.0;
    std::string trace;
    std::string dump_transition;
  } rank;
  auto* rank_cmd =
      app.add_subcommand("rank", "top-K selection from an observations file");
  AddCommon(rank_cmd, rank_c);
  rank_cmd->add_option("--input", rank.input, "observations file")->required();
  rank_cmd->add_option("--eta", rank.eta, "mixture weight (default: header)");
  rank_cmd->add_option("--k", rank.K)->capture_default_str();
  rank_cmd->add_option("--T", rank.T, "refinement rounds (default ceil(ln n))");
  rank_cmd->add_option("--c", rank.c, "threshold constant")
      ->capture_default_str();
  rank_cmd->add_option("--threshold", rank.threshold, "known | estimated")
      ->check(CLI::IsMember({"known", "estimated"}))
      ->capture_default_str();
  rank_cmd->add_option("--w-min", rank.w_min)->capture_default_str();
  rank_cmd->add_option("--w-max", rank.w_max)->capture_default_str();
  rank_cmd->add_option("--trace", rank.trace, "write the refinement trace CSV");
  rank_cmd->add_option("--dump-transition", rank.dump_transition,
                       "write the full-graph transition matrix (row col value)");
  rank_cmd->callback([&] {
    run = [&] {
      ScaleDefault(rank_cmd, rank_c, "--k", rank.K, 10);
      std::ifstream in = OpenInput(rank.input);
      const ObservationFile file = ReadObservations(in);
      const double eta = rank.eta.value_or(file.eta);
      const int n = file.graph.n();
      const ScoreRange range{rank.w_min, rank.w_max};
      RefinementConfig cfg = RefinementConfig::Default(
          n, eta,
          rank.threshold == "estimated" ? ThresholdMode::kEstimatedEta
                                        : ThresholdMode::kKnownEta);
      if (rank.T) cfg.T = *rank.T;
      cfg.c = rank.c;
      if (!rank.dump_transition.empty()) {
        Sink s(rank.dump_transition, out);
        BuildTransitionMatrix(ShiftMeans(file.batch, MixtureParams(eta)),
                              file.graph)
            .WriteCoordinateText(*s);
        s.Finish();
      }
      const SpectralMleResult result =
          SpectralMle(file.batch, file.graph, eta, rank.K, cfg, range,
                      rank_c.seed);
      if (result.trace.disconnected) {
        err << "warning: comparison graph is disconnected; the ranking is not "
               "identifiable\n";
      }
      if (result.trace.init_fallback) {
        err << "note: init half of the edges was disconnected; spectral "
               "initialization used all edges\n";
      }
      if (!result.trace.stationary_converged) {
        err << "warning: power iteration hit its iteration cap\n";
      }
      if (!rank.trace.empty()) {
        Sink s(rank.trace, out);
        result.trace.WriteCsv(*s);
        s.Finish();
      }
      Sink sink(rank_c.out, out);
      *sink << JoinIndices(result.top_k) << '\n';
      sink.Finish();
    };
  });

  // estimate-eta
  Common est_c;
  struct {
    std::string input;
    std::string method = "tensor";
    int cap = kDefaultTensorCap;
  } est;
  auto* est_cmd = app.add_subcommand(
      "estimate-eta", "estimate eta from worker-level responses (CSV)");
  AddCommon(est_cmd, est_c);
  est_cmd->add_option("--input", est.input, "worker CSV")->required();
  est_cmd->add_option("--method", est.method, "tensor | eigen | both")
      ->check(CLI::IsMember({"tensor", "eigen", "both"}))
      ->capture_default_str();
  est_cmd->add_option("--cap", est.cap, "third-moment size cap (coordinates)")
      ->capture_default_str();
  est_cmd->callback([&] {
    run = [&] {
      std::ifstream in = OpenInput(est.input);
      const WorkerResponses wr = ReadWorkerCsv(in);
      const bool tensor = est.method != "eigen";
      const MomentPair m = EmpiricalMoments(wr, tensor, est.cap);
      std::vector<EtaEstimate> rows;
      if (est.method != "tensor") rows.push_back(EstimateEtaEigen(m));
      if (tensor) {
        TensorPowerConfig tcfg;
        tcfg.seed = est_c.seed;
        rows.push_back(EstimateEtaTensor(m, tcfg));
      }
      Sink sink(est_c.out, out);
      *sink << "method,eta_hat,sigma1,sigma2,mu,residual,degenerate,clamped\n";
      for (const EtaEstimate& e : rows) {
        *sink << (e.method == EtaMethod::kTensorPower ? "tensor" : "eigen")
              << ',' << FormatCsvDouble(e.eta_hat) << ','
              << FormatCsvDouble(e.sigma1) << ',' << FormatCsvDouble(e.sigma2)
              << ',' << FormatCsvDouble(e.mu) << ','
              << FormatCsvDouble(e.residual) << ',' << e.degenerate << ','
              << e.clamped << '\n';
      }
      sink.Finish();
    };
  });

  // sweep-eta
  Common se_c;
  SweepFlags se_f;
  std::vector<double> se_eta = {0.55, 0.6, 0.65, 0.7, 0.75, 0.8};
  std::vector<double> se_delta = {0.1, 0.2, 0.3, 0.4};
  std::vector<std::int64_t> se_L = {1000};
  auto* se_cmd =
      app.add_subcommand("sweep-eta", "success rate over eta and delta_K");
  AddCommon(se_cmd, se_c);
  AddSweepFlags(se_cmd, se_f);
  se_cmd->add_option("--eta-grid", se_eta)->delimiter(',')->capture_default_str();
  se_cmd->add_option("--delta-k-grid", se_delta)
      ->delimiter(',')
      ->capture_default_str();
  se_cmd->add_option("--L", se_L, "samples per edge (list)")
      ->delimiter(',')
      ->capture_default_str();
  se_cmd->callback([&] {
    run = [&] {
      SweepConfig cfg = MakeSweepConfig(se_cmd, se_c, se_f);
      cfg.eta_grid = se_eta;
      cfg.delta_k_grid = se_delta;
      cfg.L_grid = se_L;
      const SweepResult result = SweepEta(cfg);
      Sink sink(se_c.out, out);
      result.WriteCsv(*sink);
      sink.Finish();
    };
  });

  // sweep-samples
  Common ss_c;
  SweepFlags ss_f;
  std::vector<double> ss_eta = {0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> ss_s = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  double ss_delta = 0.4;
  auto* ss_cmd = app.add_subcommand(
      "sweep-samples", "success rate against normalized sample size");
  AddCommon(ss_cmd, ss_c);
  AddSweepFlags(ss_cmd, ss_f);
  ss_cmd->add_option("--eta-grid", ss_eta)->delimiter(',')->capture_default_str();
  ss_cmd->add_option("--s-norm-grid", ss_s)
      ->delimiter(',')
      ->capture_default_str();
  ss_cmd->add_option("--delta-k", ss_delta)->capture_default_str();
  ss_cmd->callback([&] {
    run = [&] {
      SweepConfig cfg = MakeSweepConfig(ss_cmd, ss_c, ss_f);
      cfg.eta_grid = ss_eta;
      cfg.delta_k_grid = {ss_delta};
      const SweepResult result = SweepNormalizedSamples(cfg, ss_s);
      Sink sink(ss_c.out, out);
      result.WriteCsv(*sink);
      sink.Finish();
    };
  });

  // bisect-l
  Common bl_c;
  SweepFlags bl_f;
  BisectionConfig bl_b;
  std::vector<double> bl_eta = {0.56, 0.6, 0.65, 0.7};
  double bl_delta = 0.4;
  auto* bl_cmd = app.add_subcommand(
      "bisect-l", "minimal samples per edge reaching a target success rate");
  AddCommon(bl_cmd, bl_c);
  AddSweepFlags(bl_cmd, bl_f);
  bl_cmd->add_option("--eta-grid", bl_eta)->delimiter(',')->capture_default_str();
  bl_cmd->add_option("--delta-k", bl_delta)->capture_default_str();
  bl_cmd->add_option("--q-th", bl_b.q_th)->capture_default_str();
  bl_cmd->add_option("--eps", bl_b.eps)->capture_default_str();
  bl_cmd->add_option("--repeats", bl_b.repeats)->capture_default_str();
  bl_cmd->add_option("--s-lo", bl_b.s_norm_lo, "bracket low end (S_norm)")
      ->capture_default_str();
  bl_cmd->add_option("--s-hi", bl_b.s_norm_hi, "bracket high end (S_norm)")
      ->capture_default_str();
  bl_cmd->add_option("--max-trial-multiplier", bl_b.max_trial_multiplier)
      ->capture_default_str();
  bl_cmd->add_option("--rel-width", bl_b.rel_width,
                     "stop when the bracket is this narrow (relative)")
      ->capture_default_str();
  bl_cmd->callback([&] {
    run = [&] {
      SweepConfig cfg = MakeSweepConfig(bl_cmd, bl_c, bl_f);
      cfg.delta_k_grid = {bl_delta};
      std::vector<BisectionResult> results;
      std::vector<std::pair<double, double>> points;
      for (double eta : bl_eta) {
        results.push_back(BisectMinL(cfg, eta, bl_b));
        points.emplace_back(eta, results.back().mean_L);
      }
      Sink sink(bl_c.out, out);
      for (std::size_t k = 0; k < results.size(); ++k) {
        results[k].WriteCsv(*sink, k == 0);
      }
      sink.Finish();
      std::ostream& summary = bl_c.out.empty() ? err : out;
      for (const BisectionResult& r : results) {
        summary << "eta=" << FormatCsvDouble(r.eta)
                << " mean_L=" << FormatCsvDouble(r.mean_L)
                << " std_L=" << FormatCsvDouble(r.std_L) << '\n';
      }
      if (points.size() >= 2) {
        const InverseSquareFit fit = FitInverseSquare(points);
        summary << "fit C/(2eta-1)^2: C=" << FormatCsvDouble(fit.C)
                << " relative_rms=" << FormatCsvDouble(fit.residual) << '\n';
      }
    };
  });

  // bounds
  Common b_c;
  struct {
    int n = 200;
    int K = 5;
    double eta = 0.75;
    double delta_k = 0.4;
    std::string p = "auto";
    std::vector<double> L = {0.0, 1.0, 10.0, 100.0};
    BoundConstants constants;
    double target = 0.5;
  } bnd;
  auto* b_cmd = app.add_subcommand(
      "bounds", "Fano lower bound and sample-complexity scaling (up to "
                "constants)");
  AddCommon(b_cmd, b_c);
  b_cmd->add_option("--n", bnd.n)->capture_default_str();
  b_cmd->add_option("--k", bnd.K)->capture_default_str();
  b_cmd->add_option("--eta", bnd.eta)->capture_default_str();
  b_cmd->add_option("--delta-k", bnd.delta_k)->capture_default_str();
  b_cmd->add_option("--p", bnd.p, "edge probability or 'auto'")
      ->capture_default_str();
  b_cmd->add_option("--L", bnd.L, "samples per edge (list)")
      ->delimiter(',')
      ->capture_default_str();
  b_cmd->add_option("--c-i", bnd.constants.C_I)->capture_default_str();
  b_cmd->add_option("--c-known", bnd.constants.C_known)->capture_default_str();
  b_cmd->add_option("--c-unknown", bnd.constants.C_unknown)
      ->capture_default_str();
  b_cmd->add_option("--target", bnd.target,
                    "Fano bound level for the threshold L")
      ->capture_default_str();
  b_cmd->callback([&] {
    run = [&] {
      ScaleDefault(b_cmd, b_c, "--n", bnd.n, 1000);
      ScaleDefault(b_cmd, b_c, "--k", bnd.K, 10);
      BoundQuery q;
      q.n = bnd.n;
      q.K = bnd.K;
      q.eta = bnd.eta;
      q.delta_K = bnd.delta_k;
      q.p = ResolveP(bnd.p, bnd.n);
      q.constants = bnd.constants;
      q.Validate();
      const double known = SampleComplexityScaling(q, Regime::kKnownEta);
      const double unknown = SampleComplexityScaling(q, Regime::kUnknownEta);
      const double threshold = FanoThresholdL(q, bnd.target);

      out << "query: n=" << q.n << " K=" << q.K << " p=" << FormatCsvDouble(q.p)
          << " eta=" << FormatCsvDouble(q.eta)
          << " delta_K=" << FormatCsvDouble(q.delta_K) << '\n'
          << "values hold up to constants (C_I="
          << FormatCsvDouble(q.constants.C_I)
          << ", C_known=" << FormatCsvDouble(q.constants.C_known)
          << ", C_unknown=" << FormatCsvDouble(q.constants.C_unknown) << ")\n"
          << "scaling_known   " << FormatCsvDouble(known) << '\n'
          << "scaling_unknown " << FormatCsvDouble(unknown) << '\n'
          << "fano_L_at_" << FormatCsvDouble(bnd.target) << "   "
          << FormatCsvDouble(threshold) << '\n'
          << std::left << std::setw(14) << "L" << std::setw(16) << "I_ub"
          << "fano_bound\n";
      std::ostringstream csv;
      csv << "n,K,p,L,eta,delta_k,I_ub,fano_bound,fano_L_threshold,"
             "scaling_known,scaling_unknown\n";
      for (double L : bnd.L) {
        q.L = L;
        const FanoBound fb = FanoLowerBound(q);
        out << std::left << std::setw(14) << FormatCsvDouble(L) << std::setw(16)
            << FormatCsvDouble(fb.mutual_information)
            << FormatCsvDouble(fb.bound) << '\n';
        csv << q.n << ',' << q.K << ',' << FormatCsvDouble(q.p) << ','
            << FormatCsvDouble(L) << ',' << FormatCsvDouble(q.eta) << ','
            << FormatCsvDouble(q.delta_K) << ','
            << FormatCsvDouble(fb.mutual_information) << ','
            << FormatCsvDouble(fb.bound) << ',' << FormatCsvDouble(threshold)
            << ',' << FormatCsvDouble(known) << ',' << FormatCsvDouble(unknown)
            << '\n';
      }
      if (!b_c.out.empty()) {
        Sink sink(b_c.out, out);
        *sink << csv.str();
        sink.Finish();
      }
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const CLI::App* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kExitUsage;
  }

  try {
    if (run) run();
    return kExitOk;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace advtopk
