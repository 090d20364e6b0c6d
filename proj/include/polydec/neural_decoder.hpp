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

#ifndef POLYDEC_NEURAL_DECODER_H_
#define POLYDEC_NEURAL_DECODER_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polydec/automaton.hpp"
#include "polydec/neural.hpp"
#include "polydec/translation.hpp"

namespace polydec {

struct NeuralDecodeOptions {
  int start = 0;
  double initial_score = 0.0;
  int beam = 5;  // top-l cut on outgoing edges, per node
  // Decoder state at the start node; defaults to the model's InitState.
  std::optional<DecoderStepState> initial_state;
  std::set<std::string> banned_start_labels;
  // Required when the model is bias-enabled.
  const TranslationTable* inverse_table = nullptr;
  DecodeStats* stats = nullptr;
};

// Beam-limited shortest-path search over the component graph with the
// neural scorer. One decoder state per node; when two prefixes reconverge
// only the cheaper one's state survives (counted as a state clobber).
Translation DecodeNeural(const TokenSeq& x, const ComponentGraph& graph,
                         const NeuralModel& model,
                         const NeuralDecodeOptions& options = {});

// Emission probabilities of u's outgoing edges under the full-vocabulary
// softmax (plus copy mass); probabilities need not sum to 1 over the
// adjacency. Order matches graph.Out(u).
std::vector<double> NormalizeOverAdjacency(const EmissionResult& emission,
                                           const EncoderOutput& enc,
                                           const NeuralModel& model,
                                           const ComponentGraph& graph, int u,
                                           DecodeStats* stats = nullptr);

}  // namespace polydec

#endif  // POLYDEC_NEURAL_DECODER_H_
