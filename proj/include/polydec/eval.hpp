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

#ifndef POLYDEC_EVAL_H_
#define POLYDEC_EVAL_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polydec/corpus.hpp"

namespace polydec {

// One evaluated input: gold sequence, the system's ranked outputs, and the
// rank (1-based) of the first exact match, if any. Matching is exact
// token-sequence equality on tag-stripped sequences.
struct EvalRecord {
  TokenSeq input;
  TokenSeq gold;
  std::vector<TokenSeq> outputs;
  std::optional<int> matched_rank;
  std::optional<std::string> tag;
  int well_formed_count = 0;

  static EvalRecord Make(TokenSeq input, TokenSeq gold,
                         std::vector<TokenSeq> outputs,
                         std::optional<std::string> tag = std::nullopt);
};

struct EvalSummary {
  double acc_at_1 = 0.0;
  double acc_at_10 = 0.0;
  double mrr = 0.0;
  double well_formed_rate = 0.0;
  size_t n = 0;
  std::map<std::string, EvalSummary> per_tag;  // only at the top level

  // `metric TAB value` lines.
  std::string ToKeyValueLines() const;
  std::string ToTable() const;
};

// Acc@r = fraction with matched_rank <= r; MRR = mean reciprocal rank with
// 0 for misses; well-formed rate over all emitted outputs.
EvalSummary Evaluate(const std::vector<EvalRecord>& records);

// Deterministic seeded partition; fractions must sum to 1 (within 1e-9)
// and each lie in [0, 1].
struct SplitResult {
  ParallelCorpus train;
  ParallelCorpus dev;
  ParallelCorpus test;
};
SplitResult SplitDataset(const ParallelCorpus& corpus, double train_frac,
                         double dev_frac, double test_frac, uint64_t seed);

}  // namespace polydec

#endif  // POLYDEC_EVAL_H_
