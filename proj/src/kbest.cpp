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

#include "polydec/kbest.hpp"

#include <cmath>
#include <map>

#include "polydec/errors.hpp"

namespace polydec {
namespace {

// Follows the prefix's deterministic transitions; throws on an invalid
// prefix.
int WalkPrefix(const ComponentGraph& graph, int start,
               const TokenSeq& prefix) {
  int node = start;
  for (const auto& label : prefix) {
    const ComponentGraph::Edge* next = nullptr;
    for (const auto& e : graph.Out(node)) {
      if (e.label == label) {
        next = &e;
        break;
      }
    }
    if (next == nullptr) {
      throw DataError("forced prefix is not a valid path from the start node");
    }
    node = next->to;
  }
  return node;
}

Translation WithPrefix(const TokenSeq& prefix, Translation suffix,
                       const ComponentGraph& graph, int start) {
  Translation full;
  full.labels = prefix;
  full.labels.insert(full.labels.end(), suffix.labels.begin(),
                     suffix.labels.end());
  full.score = suffix.score;
  if (start == graph.source() && !full.labels.empty()) {
    full.language = LanguageFromToken(full.labels.front());
    if (full.language) {
      bool is_edge = false;
      for (const auto& e : graph.Out(graph.source())) {
        is_edge |= e.label == full.labels.front();
      }
      if (!is_edge) full.language.reset();
    }
  }
  return full;
}

}  // namespace

std::optional<Translation> LexicalScorer::Decode(
    const TokenSeq& x, const ComponentGraph& graph,
    const ConstrainedDecodeRequest& request) const {
  int spur = WalkPrefix(graph, request.start, request.forced_prefix);

  // Accumulate the running sums along the forced prefix; the suffix search
  // then scores complete paths exactly as an unconstrained decode would.
  std::vector<double> sums(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sums[i] = null_init_ ? table_.prob(x[i], kNullToken) : 0.0;
  }
  for (const auto& label : request.forced_prefix) {
    for (size_t i = 0; i < x.size(); ++i) sums[i] += table_.prob(x[i], label);
  }
  double prefix_score = 0.0;
  for (double s : sums) prefix_score -= std::log(s);

  LexicalDecodeOptions options;
  options.start = spur;
  options.initial_score = request.forced_prefix.empty() ? 0.0 : prefix_score;
  options.null_init = null_init_;
  options.initial_sums = sums;
  options.banned_start_labels = request.banned_edges;
  try {
    Translation suffix = DecodeLexical(x, graph, table_, options);
    return WithPrefix(request.forced_prefix, std::move(suffix), graph,
                      request.start);
  } catch (const SearchError&) {
    return std::nullopt;
  }
}

std::optional<Translation> NeuralScorer::Decode(
    const TokenSeq& x, const ComponentGraph& graph,
    const ConstrainedDecodeRequest& request) const {
  int spur = WalkPrefix(graph, request.start, request.forced_prefix);

  // Teacher-force the prefix to rebuild the decoder state and score.
  EncoderOutput enc = model_.Encode(x);
  DecoderStepState state = model_.InitState();
  double prefix_score = 0.0;
  for (const auto& label : request.forced_prefix) {
    EmissionResult em = model_.Emit(state, enc, inverse_);
    prefix_score -= std::log(model_.EmissionProb(em, enc, label));
    state = model_.Advance(em.step, model_.target_vocab().Id(label),
                           state.step_index + 1);
  }

  NeuralDecodeOptions options;
  options.start = spur;
  options.initial_score = prefix_score;
  options.beam = beam_;
  options.initial_state = state;
  options.banned_start_labels = request.banned_edges;
  options.inverse_table = inverse_;
  try {
    Translation suffix = DecodeNeural(x, graph, model_, options);
    return WithPrefix(request.forced_prefix, std::move(suffix), graph,
                      request.start);
  } catch (const SearchError&) {
    return std::nullopt;
  }
}

KBestList DecodeK(const TokenSeq& x, const ComponentGraph& graph,
                  const Scorer& scorer, int k, int start) {
  if (k < 1) throw DataError("k must be at least 1");
  KBestList result;
  result.k_requested = k;

  auto first = scorer.Decode(x, graph, ConstrainedDecodeRequest{{}, {}, start});
  if (!first) return result;
  result.items.push_back(std::move(*first));

  std::set<TokenSeq> seen{result.items.front().labels};
  // Candidate pool keyed by (score, labels): ascending, order-fixed.
  std::map<std::pair<double, TokenSeq>, Translation> pool;

  while (static_cast<int>(result.items.size()) < k) {
    const Translation prev = result.items.back();
    for (size_t spur = 0; spur <= prev.labels.size(); ++spur) {
      ConstrainedDecodeRequest request;
      request.start = start;
      request.forced_prefix.assign(prev.labels.begin(),
                                   prev.labels.begin() + spur);
      // Ban the continuations already taken by accepted paths sharing this
      // root; a path ending exactly at the root took the EOS edge.
      for (const auto& accepted : result.items) {
        if (accepted.labels.size() < spur) continue;
        if (!std::equal(request.forced_prefix.begin(),
                        request.forced_prefix.end(),
                        accepted.labels.begin())) {
          continue;
        }
        request.banned_edges.insert(accepted.labels.size() == spur
                                        ? kEosLabel
                                        : accepted.labels[spur]);
      }
      auto candidate = scorer.Decode(x, graph, request);
      if (!candidate || seen.count(candidate->labels)) continue;
      pool.emplace(std::make_pair(candidate->score, candidate->labels),
                   *candidate);
    }
    // Drop pooled candidates that were accepted in the meantime.
    while (!pool.empty() && seen.count(pool.begin()->second.labels)) {
      pool.erase(pool.begin());
    }
    if (pool.empty()) break;
    seen.insert(pool.begin()->second.labels);
    result.items.push_back(pool.begin()->second);
    pool.erase(pool.begin());
  }
  return result;
}

}  // namespace polydec
