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

#ifndef POLYDEC_LEXICAL_DECODER_H_
#define POLYDEC_LEXICAL_DECODER_H_

#include <set>
#include <string>
#include <vector>

#include "polydec/automaton.hpp"
#include "polydec/lexical_model.hpp"
#include "polydec/translation.hpp"

namespace polydec {

struct LexicalDecodeOptions {
  int start = 0;
  // Initial score o at the start node.
  double initial_score = 0.0;
  // When true, the running sums start at p_t(x_i|null); when false they
  // start at the literal 0.0. Both the relaxation and the reported score
  // use the same convention.
  bool null_init = true;
  // Overrides the initial running sums (used to force a path prefix); must
  // be empty or of size |x|.
  std::vector<double> initial_sums;
  // Labels that may not be taken out of the start node.
  std::set<std::string> banned_start_labels;
  DecodeStats* stats = nullptr;
};

// Single-source shortest-path decode over the component graph with
// dynamically computed lexical scores. Keeps one running-sum vector per
// node (hypothesis recombination); exact on trees, an approximation on
// reconvergent DAGs.
Translation DecodeLexical(const TokenSeq& x, const ComponentGraph& graph,
                          const TranslationTable& table,
                          const LexicalDecodeOptions& options = {});

// The objective the search minimizes for a complete path:
// -log prod_j [null term + sum_{z in labels} p_t(x_j|z)].
double ScorePath(const TokenSeq& x, const TokenSeq& labels,
                 const TranslationTable& table, bool include_null = true);

}  // namespace polydec

#endif  // POLYDEC_LEXICAL_DECODER_H_
