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

#include "polydec/neural_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polydec/errors.hpp"

namespace polydec {

std::vector<double> NormalizeOverAdjacency(const EmissionResult& emission,
                                           const EncoderOutput& enc,
                                           const NeuralModel& model,
                                           const ComponentGraph& graph, int u,
                                           DecodeStats* stats) {
  const auto& out = graph.Out(u);
  std::vector<double> probs(out.size());
  for (size_t i = 0; i < out.size(); ++i) {
    bool unknown = false;
    probs[i] = model.EmissionProb(emission, enc, out[i].label, &unknown);
    if (unknown && stats) ++stats->unknown_labels;
  }
  return probs;
}

Translation DecodeNeural(const TokenSeq& x, const ComponentGraph& graph,
                         const NeuralModel& model,
                         const NeuralDecodeOptions& options) {
  if (x.empty()) throw DataError("cannot decode an empty input");
  if (options.beam < 1) throw DataError("beam size must be at least 1");
  if (model.config().bias_enabled && options.inverse_table == nullptr) {
    throw DataError("model is bias-enabled but no inverse table was given");
  }
  const int n_nodes = graph.node_count();
  const int start = options.start;
  if (start < 0 || start >= n_nodes) {
    throw DataError("decode start node out of range");
  }

  EncoderOutput enc = model.Encode(x);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n_nodes, kInf);
  std::vector<int> pred(n_nodes, -1);
  std::vector<std::string> pred_label(n_nodes);
  std::vector<std::optional<DecoderStepState>> state(n_nodes);

  d[start] = options.initial_score;
  state[start] = options.initial_state ? *options.initial_state
                                       : model.InitState();

  for (int u = start; u < graph.sink(); ++u) {
    if (std::isinf(d[u])) continue;
    if (options.stats) ++options.stats->nodes_visited;

    EmissionResult emission = model.Emit(*state[u], enc, options.inverse_table);
    const auto& out = graph.Out(u);
    std::vector<double> probs =
        NormalizeOverAdjacency(emission, enc, model, graph, u, options.stats);

    // Top-l edges by model probability; ties fall back to label order,
    // which is the adjacency order.
    std::vector<size_t> ranked;
    ranked.reserve(out.size());
    for (size_t i = 0; i < out.size(); ++i) {
      if (u == start && options.banned_start_labels.count(out[i].label)) {
        continue;
      }
      ranked.push_back(i);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&probs](size_t a, size_t b) {
                       return probs[a] > probs[b];
                     });
    size_t keep = std::min(ranked.size(), static_cast<size_t>(options.beam));
    if (options.stats) options.stats->edges_pruned += ranked.size() - keep;

    for (size_t r = 0; r < keep; ++r) {
      size_t i = ranked[r];
      const auto& edge = out[i];
      if (options.stats) ++options.stats->edges_scored;
      double score = d[u] - std::log(probs[i]);
      bool better = score < d[edge.to] ||
                    (score == d[edge.to] && pred[edge.to] >= 0 &&
                     edge.label < pred_label[edge.to]);
      if (better) {
        if (options.stats && state[edge.to]) ++options.stats->state_clobbers;
        d[edge.to] = score;
        pred[edge.to] = u;
        pred_label[edge.to] = edge.label;
        state[edge.to] =
            model.Advance(emission.step, model.target_vocab().Id(edge.label),
                          state[u]->step_index + 1);
      }
    }
  }

  int sink = graph.sink();
  if (std::isinf(d[sink])) {
    throw SearchError(
        "no path reached the sink; try a larger beam (current l=" +
        std::to_string(options.beam) + ")");
  }

  Translation result;
  result.score = d[sink];
  for (int v = sink; v != start; v = pred[v]) {
    if (pred_label[v] != kEosLabel) result.labels.push_back(pred_label[v]);
  }
  std::reverse(result.labels.begin(), result.labels.end());
  if (start == graph.source() && !result.labels.empty()) {
    for (const auto& e : graph.Out(graph.source())) {
      if (e.label == result.labels.front()) {
        result.language = LanguageFromToken(result.labels.front());
        break;
      }
    }
  }
  return result;
}

}  // namespace polydec
