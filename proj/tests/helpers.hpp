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

// Shared fixtures and reference implementations ("oracles") used by both
// the unit suites and the acceptance suite. The oracles are deliberately
// naive: enumeration and set arithmetic instead of the algorithms under
// test.

#ifndef POLYDEC_TESTS_HELPERS_H_
#define POLYDEC_TESTS_HELPERS_H_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "polydec/automaton.hpp"
#include "polydec/corpus.hpp"
#include "polydec/lexical_model.hpp"

namespace polydec::testing {

// Self-deleting temp file path.
class TempFile {
 public:
  explicit TempFile(const std::string& hint) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("polydec_test_" + std::to_string(counter++) + "_" + hint))
                .string();
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline std::vector<std::string> MakeAlphabet(int size) {
  std::vector<std::string> alphabet;
  for (int i = 0; i < size; ++i) alphabet.push_back("t" + std::to_string(i));
  return alphabet;
}

// Random non-empty sequence set; duplicates possible by design (the builder
// must collapse them).
inline std::vector<std::vector<std::string>> RandomSequenceSet(
    std::mt19937_64& rng, int max_sequences, int max_len,
    const std::vector<std::string>& alphabet) {
  int n = 1 + static_cast<int>(rng() % max_sequences);
  std::vector<std::vector<std::string>> sequences;
  for (int s = 0; s < n; ++s) {
    int len = 1 + static_cast<int>(rng() % max_len);
    std::vector<std::string> seq;
    for (int i = 0; i < len; ++i) seq.push_back(alphabet[rng() % alphabet.size()]);
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

// A sequence set whose minimal automaton is a tree below the start node
// (apart from the shared pre-sink accepting state): every new sequence is a
// random prefix of an earlier one extended with globally fresh tokens.
inline std::vector<std::vector<std::string>> RandomTreeSequenceSet(
    std::mt19937_64& rng, int n_sequences, int max_extra_len) {
  std::vector<std::vector<std::string>> sequences;
  int fresh = 0;
  for (int s = 0; s < n_sequences; ++s) {
    std::vector<std::string> seq;
    if (!sequences.empty()) {
      const auto& base = sequences[rng() % sequences.size()];
      size_t cut = rng() % base.size();  // strict prefix
      seq.assign(base.begin(), base.begin() + cut);
    }
    int extra = 1 + static_cast<int>(rng() % max_extra_len);
    for (int i = 0; i < extra; ++i) seq.push_back("u" + std::to_string(fresh++));
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

// Minimal-DFA state count for a finite language, by Myhill-Nerode residual
// counting. The language is the input set with the reserved EOS label
// appended, matching how the builder represents acceptance, so the count is
// directly comparable with ComponentGraph::node_count().
inline size_t MinimalStateCountOracle(
    const std::vector<std::vector<std::string>>& sequences) {
  std::set<std::vector<std::string>> language;
  for (auto seq : sequences) {
    seq.push_back(kEosLabel);
    language.insert(std::move(seq));
  }
  std::set<std::vector<std::string>> prefixes;
  for (const auto& word : language) {
    for (size_t len = 0; len <= word.size(); ++len) {
      prefixes.insert({word.begin(), word.begin() + len});
    }
  }
  std::set<std::set<std::vector<std::string>>> residuals;
  for (const auto& prefix : prefixes) {
    std::set<std::vector<std::string>> residual;
    for (const auto& word : language) {
      if (word.size() < prefix.size()) continue;
      if (!std::equal(prefix.begin(), prefix.end(), word.begin())) continue;
      residual.insert({word.begin() + prefix.size(), word.end()});
    }
    residuals.insert(std::move(residual));
  }
  return residuals.size();
}

// p(x|z) by explicit enumeration of all (|z|+1)^|x| alignments, including
// the null position. Exponential; for |x|,|z| <= 4 only.
inline double AlignmentEnumerationLikelihood(const TranslationTable& table,
                                             const TokenSeq& x,
                                             const TokenSeq& z,
                                             bool normalize) {
  size_t slots = z.size() + 1;
  size_t total = 1;
  for (size_t j = 0; j < x.size(); ++j) total *= slots;
  double sum = 0.0;
  for (size_t code = 0; code < total; ++code) {
    double product = 1.0;
    size_t rest = code;
    for (size_t j = 0; j < x.size(); ++j) {
      size_t i = rest % slots;
      rest /= slots;
      const std::string& given = i == 0 ? kNullToken : z[i - 1];
      product *= table.prob(x[j], given);
    }
    sum += product;
  }
  if (normalize) {
    for (size_t j = 0; j < x.size(); ++j) sum /= static_cast<double>(slots);
  }
  return sum;
}

// Random dense table over small vocabularies, rows normalized.
inline TranslationTable RandomTable(std::mt19937_64& rng,
                                    const std::vector<std::string>& outcomes,
                                    const std::vector<std::string>& givens) {
  TranslationTable table = UniformTable(outcomes, givens);
  // Re-derive random rows through the EM entry point is unavailable here;
  // instead perturb by training on a random corpus would be circular. A
  // direct construction keeps the oracle independent: save/load a
  // hand-written table file.
  TempFile file("table.tsv");
  {
    FILE* f = std::fopen(file.path().c_str(), "w");
    std::fprintf(f, "# direction=forward floor=1e-10 null=1\n");
    std::vector<std::string> rows = givens;
    rows.push_back(kNullToken);
    for (const auto& given : rows) {
      std::vector<double> weights;
      double total = 0.0;
      for (size_t i = 0; i < outcomes.size(); ++i) {
        double w = 0.05 + static_cast<double>(rng() % 1000) / 1000.0;
        weights.push_back(w);
        total += w;
      }
      for (size_t i = 0; i < outcomes.size(); ++i) {
        std::fprintf(f, "%s\t%s\t%.17g\n", given.c_str(), outcomes[i].c_str(),
                     weights[i] / total);
      }
    }
    std::fclose(f);
  }
  return TranslationTable::Load(file.path());
}

inline std::string JoinTokens(const TokenSeq& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace polydec::testing

#endif  // POLYDEC_TESTS_HELPERS_H_
