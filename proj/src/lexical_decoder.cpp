// Copyright 2026 The Polydec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polydec/lexical_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polydec/errors.hpp"

namespace polydec {

Translation DecodeLexical(const TokenSeq& x, const ComponentGraph& graph,
                          const TranslationTable& table,
                          const LexicalDecodeOptions& options) {
  if (x.empty()) throw DataError("cannot decode an empty input");
  const int n_nodes = graph.node_count();
  const int start = options.start;
  if (start < 0 || start >= n_nodes) {
    throw DataError("decode start node out of range");
  }
  const size_t n = x.size();
  if (!options.initial_sums.empty() && options.initial_sums.size() != n) {
    throw DataError("initial sums must match the input length");
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n_nodes, kInf);
  std::vector<int> pred(n_nodes, -1);
  std::vector<std::string> pred_label(n_nodes);
  std::vector<std::vector<double>> sums(n_nodes);

  d[start] = options.initial_score;
  if (!options.initial_sums.empty()) {
    sums[start] = options.initial_sums;
  } else if (options.null_init) {
    sums[start].reserve(n);
    for (const auto& xi : x) sums[start].push_back(table.prob(xi, kNullToken));
  } else {
    sums[start].assign(n, 0.0);
  }

  std::vector<double> next(n);
  for (int u = start; u < graph.sink(); ++u) {
    if (std::isinf(d[u])) continue;
    if (options.stats) ++options.stats->nodes_visited;
    for (const auto& edge : graph.Out(u)) {
      if (u == start && options.banned_start_labels.count(edge.label)) {
        continue;
      }
      if (options.stats) ++options.stats->edges_scored;
      double score = 0.0;
      bool eos = edge.label == kEosLabel;
      if (eos) {
        for (size_t i = 0; i < n; ++i) {
          next[i] = sums[u][i];
          score -= std::log(next[i]);
        }
      } else {
        for (size_t i = 0; i < n; ++i) {
          next[i] = table.prob(x[i], edge.label) + sums[u][i];
          score -= std::log(next[i]);
        }
      }
      bool better = score < d[edge.to] ||
                    (score == d[edge.to] && pred[edge.to] >= 0 &&
                     edge.label < pred_label[edge.to]);
      if (better) {
        d[edge.to] = score;
        pred[edge.to] = u;
        pred_label[edge.to] = edge.label;
        sums[edge.to] = next;
      }
    }
  }

  int sink = graph.sink();
  if (std::isinf(d[sink])) {
    throw SearchError("no path from the start node reaches the sink");
  }

  Translation result;
  result.score = d[sink];
  for (int v = sink; v != start; v = pred[v]) {
    if (pred_label[v] != kEosLabel) result.labels.push_back(pred_label[v]);
  }
  std::reverse(result.labels.begin(), result.labels.end());
  if (start == graph.source() && !result.labels.empty()) {
    // A leading artificial token identifies the chosen output language when
    // it actually labels an edge out of the source.
    for (const auto& e : graph.Out(graph.source())) {
      if (e.label == result.labels.front()) {
        result.language = LanguageFromToken(result.labels.front());
        break;
      }
    }
  }
  return result;
}

double ScorePath(const TokenSeq& x, const TokenSeq& labels,
                 const TranslationTable& table, bool include_null) {
  double score = 0.0;
  for (const auto& xj : x) {
    double sum = include_null ? table.prob(xj, kNullToken) : 0.0;
    for (const auto& z : labels) sum += table.prob(xj, z);
    score -= std::log(sum);
  }
  return score;
}

}  // namespace polydec
