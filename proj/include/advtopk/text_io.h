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

// Line-oriented text formats. Nothing here depends on the C locale.
//
//   scores n=<n> w_min=<x> w_max=<x>          then one score per line
//   graph n=<n> p=<p> m=<edges>               then "i j" per edge
//   observations n=<n> p=<p> L=<L> eta=<eta>  then "i j y_1 ... y_L" per edge
//
// Worker responses are CSV: a header "worker,i>j,j>i,..." naming both
// coordinates of every edge, then one row per worker.

#ifndef ADVTOPK_TEXT_IO_H_
#define ADVTOPK_TEXT_IO_H_

#include <istream>
#include <ostream>
#include <string>

#include "advtopk/core_model.h"
#include "advtopk/eta_estimation.h"

namespace advtopk {

// Shortest representation that reads back to the same double.
std::string FormatDouble(double x);
// Nine significant digits, as used in every CSV output.
std::string FormatCsvDouble(double x);
// Throws ParameterError unless the whole token is a number.
double ParseDouble(const std::string& token);
std::int64_t ParseInt(const std::string& token);

void WriteScores(std::ostream& os, const ScoreVector& w);
ScoreVector ReadScores(std::istream& is);

void WriteGraph(std::ostream& os, const ComparisonGraph& g);
ComparisonGraph ReadGraph(std::istream& is);

struct ObservationFile {
  ComparisonGraph graph;
  ObservationBatch batch;
  double eta = 1.0;
};

// The batch must keep its raw samples.
void WriteObservations(std::ostream& os, const ComparisonGraph& g,
                       const ObservationBatch& batch, double eta);
ObservationFile ReadObservations(std::istream& is);

void WriteWorkerCsv(std::ostream& os, const WorkerResponses& wr);
WorkerResponses ReadWorkerCsv(std::istream& is);

}  // namespace advtopk

#endif  // ADVTOPK_TEXT_IO_H_
