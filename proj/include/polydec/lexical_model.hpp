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

#ifndef POLYDEC_LEXICAL_MODEL_H_
#define POLYDEC_LEXICAL_MODEL_H_

#include <string>
#include <unordered_map>
#include <vector>

#include "polydec/corpus.hpp"

namespace polydec {

// Reserved token for the empty alignment position z_0.
inline constexpr const char* kNullToken = "<null>";

enum class Direction { kForward, kInverse };

// IBM Model 1 lexical translation table. In the forward direction rows are
// component tokens z and each row is a multinomial over text tokens x,
// p_t(x|z); the inverse direction swaps the roles. Unseen pairs look up to
// a small positive floor.
class TranslationTable {
 public:
  TranslationTable() = default;

  double prob(const std::string& outcome, const std::string& given) const {
    auto row = rows_.find(given);
    if (row == rows_.end()) return floor_;
    auto cell = row->second.find(outcome);
    return cell == row->second.end() ? floor_ : cell->second;
  }

  double floor() const { return floor_; }
  Direction direction() const { return direction_; }
  bool trained_with_null() const { return trained_with_null_; }
  size_t row_count() const { return rows_.size(); }

  void Save(const std::string& path) const;
  static TranslationTable Load(const std::string& path);

 private:
  friend struct Model1Trainer;
  friend TranslationTable UniformTable(const std::vector<std::string>&,
                                       const std::vector<std::string>&);

  std::unordered_map<std::string, std::unordered_map<std::string, double>>
      rows_;
  double floor_ = 1e-10;
  Direction direction_ = Direction::kForward;
  bool trained_with_null_ = true;
};

// Per-iteration corpus log-likelihood of Eq.-style Model 1 (normalizer
// included); non-decreasing under EM.
using EmTrace = std::vector<double>;

struct Model1Options {
  int iterations = 10;
  Direction direction = Direction::kForward;
  bool use_null = true;
};

struct Model1Result {
  TranslationTable table;
  EmTrace trace;
};

Model1Result TrainModel1(const ParallelCorpus& corpus,
                         const Model1Options& options);

// p(x|z) under the table: prod_j sum_{i=0..|z|} p_t(x_j|z_i), where i=0 is
// the null token row. With normalize the product is divided by
// (|z|+1)^|x|, the number of many-to-one alignments.
double SentenceLikelihood(const TranslationTable& table, const TokenSeq& x,
                          const TokenSeq& z, bool normalize);

// Dense uniform table over the given outcome set, same value in every cell
// (1/|outcomes|); handy for bias-shift tests.
TranslationTable UniformTable(const std::vector<std::string>& outcomes,
                              const std::vector<std::string>& givens);

}  // namespace polydec

#endif  // POLYDEC_LEXICAL_MODEL_H_
