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

#ifndef POLYDEC_BPE_H_
#define POLYDEC_BPE_H_

#include <string>
#include <utility>
#include <vector>

#include "polydec/corpus.hpp"

namespace polydec {

// End-of-word marker used during merge learning and application. It is a
// standalone symbol while learning; on output it is attached as a suffix of
// a word's last subword unit.
inline constexpr const char* kBpeEow = "</w>";

enum class BpeSide { kSource, kTarget, kBoth };

// Ordered subword merge rules; application follows learning priority.
struct BpeModel {
  std::vector<std::pair<std::string, std::string>> merges;

  // Splits each token into subword units. The last unit of every word
  // carries a trailing kBpeEow marker (or is a learned merge already
  // containing it), so the original sequence can be recovered.
  TokenSeq Apply(const TokenSeq& tokens) const;

  // Inverse of Apply: joins subword units back into the original tokens.
  static TokenSeq Restore(const TokenSeq& units);

  void Save(const std::string& path) const;
  static BpeModel Load(const std::string& path);
};

// Greedy byte-pair merge learning over word frequency counts. Ties on
// frequency break toward the lexicographically smaller symbol pair.
BpeModel LearnBpe(const ParallelCorpus& corpus, size_t merge_count,
                  BpeSide side);

// Applies the model to the chosen side(s) of every pair, rebuilding the
// vocabularies. Artificial language tokens on the target side are never
// split.
ParallelCorpus ApplyBpeToCorpus(const BpeModel& model,
                                const ParallelCorpus& corpus, BpeSide side);

}  // namespace polydec

#endif  // POLYDEC_BPE_H_
