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

#ifndef POLYDEC_KBEST_H_
#define POLYDEC_KBEST_H_

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polydec/automaton.hpp"
#include "polydec/lexical_decoder.hpp"
#include "polydec/neural_decoder.hpp"
#include "polydec/translation.hpp"

namespace polydec {

// Prefix-forcing decode request used by the k-best engine: force the path
// to begin with forced_prefix (from start), then find the best completion
// that does not leave the prefix's end node through a banned label. The
// reserved EOS label may be banned to exclude ending exactly at the prefix.
struct ConstrainedDecodeRequest {
  TokenSeq forced_prefix;
  std::set<std::string> banned_edges;
  int start = 0;
};

// Decoder-agnostic scoring interface shared by the k-best engine.
class Scorer {
 public:
  virtual ~Scorer() = default;
  // Full path (prefix included) and its total score, or nullopt when no
  // completion survives the constraints.
  virtual std::optional<Translation> Decode(
      const TokenSeq& x, const ComponentGraph& graph,
      const ConstrainedDecodeRequest& request) const = 0;
};

class LexicalScorer : public Scorer {
 public:
  LexicalScorer(const TranslationTable& table, bool null_init = true)
      : table_(table), null_init_(null_init) {}
  std::optional<Translation> Decode(
      const TokenSeq& x, const ComponentGraph& graph,
      const ConstrainedDecodeRequest& request) const override;

 private:
  const TranslationTable& table_;
  bool null_init_;
};

class NeuralScorer : public Scorer {
 public:
  NeuralScorer(const NeuralModel& model, int beam,
               const TranslationTable* inverse = nullptr)
      : model_(model), beam_(beam), inverse_(inverse) {}
  std::optional<Translation> Decode(
      const TokenSeq& x, const ComponentGraph& graph,
      const ConstrainedDecodeRequest& request) const override;

 private:
  const NeuralModel& model_;
  int beam_;
  const TranslationTable* inverse_;
};

struct KBestList {
  std::vector<Translation> items;  // ascending score, no duplicate labels
  int k_requested = 0;
};

// Yen's k shortest paths layered over the constrained decode interface.
// Returns fewer than k items when the reachable path set is exhausted.
KBestList DecodeK(const TokenSeq& x, const ComponentGraph& graph,
                  const Scorer& scorer, int k, int start = 0);

}  // namespace polydec

#endif  // POLYDEC_KBEST_H_
