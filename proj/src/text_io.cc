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

#include "advtopk/text_io.h"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>
#include <utility>
#include <vector>

#include "advtopk/errors.h"

namespace advtopk {
namespace {

std::vector<std::string> SplitOn(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::vector<std::string> Tokens(const std::string& line) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : line) {
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      if (!token.empty()) out.push_back(std::move(token));
      token.clear();
    } else {
      token.push_back(ch);
    }
  }
  if (!token.empty()) out.push_back(std::move(token));
  return out;
}

bool NextContentLine(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!Tokens(line).empty()) return true;
  }
  return false;
}

// Parses "<kind> key=value ..." and checks the kind.
std::map<std::string, std::string> ReadHeader(std::istream& is,
                                              const std::string& kind) {
  std::string line;
  if (!NextContentLine(is, line)) {
    throw ParameterError("empty input, expected a '" + kind + "' header");
  }
  const auto tokens = Tokens(line);
  if (tokens.front() != kind) {
    throw ParameterError("expected a '" + kind + "' header, got '" +
                         tokens.front() + "'");
  }
  std::map<std::string, std::string> fields;
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    const auto eq = tokens[k].find('=');
    if (eq == std::string::npos) {
      throw ParameterError("malformed header field '" + tokens[k] + "'");
    }
    fields[tokens[k].substr(0, eq)] = tokens[k].substr(eq + 1);
  }
  return fields;
}

const std::string& Field(const std::map<std::string, std::string>& fields,
                         const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) {
    throw ParameterError("header is missing '" + key + "='");
  }
  return it->second;
}

int ParseIndex(const std::string& token) {
  const std::int64_t v = ParseInt(token);
  if (v < 0 || v > std::numeric_limits<int>::max()) {
    throw ParameterError("index out of range: " + token);
  }
  return static_cast<int>(v);
}

Edge ParseEdgeLabel(const std::string& label) {
  const auto gt = label.find('>');
  if (gt == std::string::npos) {
    throw ParameterError("column '" + label + "' is not of the form i>j");
  }
  return {ParseIndex(label.substr(0, gt)), ParseIndex(label.substr(gt + 1))};
}

}  // namespace

std::string FormatDouble(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string FormatCsvDouble(double x) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& token) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParameterError("not a number: '" + token + "'");
  }
  return v;
}

std::int64_t ParseInt(const std::string& token) {
  std::int64_t v = 0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParameterError("not an integer: '" + token + "'");
  }
  return v;
}

void WriteScores(std::ostream& os, const ScoreVector& w) {
  os << "scores n=" << w.size() << " w_min=" << FormatDouble(w.w_min())
     << " w_max=" << FormatDouble(w.w_max()) << '\n';
  for (double v : w.values()) os << FormatDouble(v) << '\n';
}

ScoreVector ReadScores(std::istream& is) {
  const auto fields = ReadHeader(is, "scores");
  const std::int64_t n = ParseInt(Field(fields, "n"));
  const ScoreRange range{ParseDouble(Field(fields, "w_min")),
                         ParseDouble(Field(fields, "w_max"))};
  std::vector<double> values;
  std::string line;
  while (NextContentLine(is, line)) {
    const auto tokens = Tokens(line);
    if (tokens.size() != 1) throw ParameterError("expected one score per line");
    values.push_back(ParseDouble(tokens[0]));
  }
  if (static_cast<std::int64_t>(values.size()) != n) {
    throw ParameterError("header says n=" + std::to_string(n) + " but " +
                         std::to_string(values.size()) + " scores follow");
  }
  return ScoreVector(std::move(values), range);
}

void WriteGraph(std::ostream& os, const ComparisonGraph& g) {
  os << "graph n=" << g.n() << " p=" << FormatDouble(g.p())
     << " m=" << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) os << e.i << ' ' << e.j << '\n';
}

ComparisonGraph ReadGraph(std::istream& is) {
  const auto fields = ReadHeader(is, "graph");
  const int n = ParseIndex(Field(fields, "n"));
  const double p = ParseDouble(Field(fields, "p"));
  std::vector<Edge> edges;
  std::string line;
  while (NextContentLine(is, line)) {
    const auto tokens = Tokens(line);
    if (tokens.size() != 2) throw ParameterError("expected 'i j' per edge");
    edges.push_back({ParseIndex(tokens[0]), ParseIndex(tokens[1])});
  }
  if (fields.count("m") &&
      ParseInt(fields.at("m")) != static_cast<std::int64_t>(edges.size())) {
    throw ParameterError("edge count does not match the header");
  }
  return ComparisonGraph(n, std::move(edges), p);
}

void WriteObservations(std::ostream& os, const ComparisonGraph& g,
                       const ObservationBatch& batch, double eta) {
  batch.CheckMatches(g);
  if (!batch.has_samples()) {
    throw ParameterError("observation batch carries no raw samples");
  }
  os << "observations n=" << g.n() << " p=" << FormatDouble(g.p())
     << " L=" << batch.L() << " eta=" << FormatDouble(eta) << '\n';
  std::string line;
  for (std::size_t k = 0; k < batch.num_edges(); ++k) {
    const Edge& e = batch.edges()[k];
    line = std::to_string(e.i) + ' ' + std::to_string(e.j);
    for (std::uint8_t y : batch.samples(k)) {
      line.push_back(' ');
      line.push_back(y ? '1' : '0');
    }
    line.push_back('\n');
    os << line;
  }
}

ObservationFile ReadObservations(std::istream& is) {
  const auto fields = ReadHeader(is, "observations");
  const int n = ParseIndex(Field(fields, "n"));
  const double p = ParseDouble(Field(fields, "p"));
  const std::int64_t L = ParseInt(Field(fields, "L"));
  const double eta = ParseDouble(Field(fields, "eta"));
  std::vector<Edge> edges;
  std::vector<std::vector<std::uint8_t>> samples;
  std::string line;
  while (NextContentLine(is, line)) {
    const auto tokens = Tokens(line);
    if (static_cast<std::int64_t>(tokens.size()) != L + 2) {
      throw ParameterError("expected 'i j' followed by " + std::to_string(L) +
                           " outcomes");
    }
    edges.push_back({ParseIndex(tokens[0]), ParseIndex(tokens[1])});
    std::vector<std::uint8_t> ys;
    ys.reserve(L);
    for (std::size_t k = 2; k < tokens.size(); ++k) {
      if (tokens[k] != "0" && tokens[k] != "1") {
        throw ParameterError("outcomes must be 0 or 1");
      }
      ys.push_back(tokens[k] == "1");
    }
    samples.push_back(std::move(ys));
  }
  // Orient every edge as i < j; a reversed line flips its outcomes.
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].i > edges[k].j) {
      std::swap(edges[k].i, edges[k].j);
      for (auto& y : samples[k]) y = 1 - y;
    }
  }
  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  std::vector<Edge> sorted_edges;
  std::vector<std::vector<std::uint8_t>> sorted_samples;
  for (std::size_t k : order) {
    sorted_edges.push_back(edges[k]);
    sorted_samples.push_back(std::move(samples[k]));
  }
  ComparisonGraph g(n, sorted_edges, p);
  ObservationBatch batch = ObservationBatch::FromSamples(
      std::move(sorted_edges), std::move(sorted_samples));
  return {std::move(g), std::move(batch), eta};
}

void WriteWorkerCsv(std::ostream& os, const WorkerResponses& wr) {
  os << "worker";
  for (const Edge& e : wr.edges()) {
    os << ',' << e.i << '>' << e.j << ',' << e.j << '>' << e.i;
  }
  os << '\n';
  std::string line;
  for (int u = 0; u < wr.num_workers(); ++u) {
    line = std::to_string(u);
    for (std::uint8_t x : wr.row(u)) {
      line.push_back(',');
      line.push_back(x ? '1' : '0');
    }
    line.push_back('\n');
    os << line;
  }
}

WorkerResponses ReadWorkerCsv(std::istream& is) {
  std::string line;
  if (!NextContentLine(is, line)) throw ParameterError("empty worker CSV");
  const auto header = SplitOn(line, ',');
  if (header.empty() || header[0] != "worker" || header.size() % 2 != 1) {
    throw ParameterError("worker CSV header must be 'worker' plus two "
                         "columns per edge");
  }
  std::vector<Edge> edges;
  for (std::size_t c = 1; c < header.size(); c += 2) {
    const Edge forward = ParseEdgeLabel(header[c]);
    const Edge backward = ParseEdgeLabel(header[c + 1]);
    if (forward.i != backward.j || forward.j != backward.i ||
        forward.i >= forward.j) {
      throw ParameterError("columns '" + header[c] + "," + header[c + 1] +
                           "' must read i>j,j>i with i < j");
    }
    edges.push_back(forward);
  }
  std::vector<std::vector<std::uint8_t>> rows;
  while (NextContentLine(is, line)) {
    const auto cells = SplitOn(line, ',');
    if (cells.size() != header.size()) {
      throw ParameterError("worker row has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(header.size()));
    }
    std::vector<std::uint8_t> row;
    row.reserve(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c] != "0" && cells[c] != "1") {
        throw ParameterError("worker responses must be 0 or 1");
      }
      row.push_back(cells[c] == "1");
    }
    rows.push_back(std::move(row));
  }
  return WorkerResponses(std::move(edges), std::move(rows));
}

}  // namespace advtopk
