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

#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "polydec/lexical_model.hpp"

using namespace polydec;
using testing::AlignmentEnumerationLikelihood;
using testing::TempFile;

namespace {

// Two-pair corpus whose first EM iterations are easy to follow by hand.
ParallelCorpus HandCorpus() {
  return MakeCorpus({
      {"the house", "das haus", ""},
      {"house", "haus", ""},
  });
}

ParallelCorpus RandomCorpus(std::mt19937_64& rng, int n_pairs) {
  std::vector<std::tuple<std::string, std::string, std::string>> rows;
  auto src = testing::MakeAlphabet(6);
  std::vector<std::string> tgt{"alpha", "beta", "gamma", "delta"};
  for (int p = 0; p < n_pairs; ++p) {
    std::string s, t;
    int ls = 1 + static_cast<int>(rng() % 4);
    int lt = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < ls; ++i) s += (i ? " " : "") + src[rng() % src.size()];
    for (int i = 0; i < lt; ++i) t += (i ? " " : "") + tgt[rng() % tgt.size()];
    rows.emplace_back(s, t, "");
  }
  return MakeCorpus(rows);
}

}  // namespace

TEST_CASE("first EM iteration matches the hand calculation") {
  // Uniform init gives every cell 1/2. The expected-count pass then assigns
  // haus counts c(the)=1/2, c(house)=1/2+1 and normalizing yields 1/4, 3/4.
  Model1Options options;
  options.iterations = 1;
  options.use_null = false;
  Model1Result r = TrainModel1(HandCorpus(), options);
  CHECK(r.table.prob("the", "haus") == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.table.prob("house", "haus") == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.table.prob("the", "das") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.table.prob("house", "das") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("second EM iteration matches the hand calculation") {
  // Iteration two collects haus counts c(the)=1/3 and c(house)=0.6+1=1.6.
  Model1Options options;
  options.iterations = 2;
  options.use_null = false;
  Model1Result r = TrainModel1(HandCorpus(), options);
  double expected = 1.6 / (1.6 + 1.0 / 3.0);
  CHECK(r.table.prob("house", "haus") ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("EM log-likelihood trace is non-decreasing") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    ParallelCorpus corpus = RandomCorpus(rng, 6);
    for (bool use_null : {true, false}) {
      Model1Options options;
      options.iterations = 8;
      options.use_null = use_null;
      Model1Result r = TrainModel1(corpus, options);
      REQUIRE(r.trace.size() == 8);
      for (size_t i = 1; i < r.trace.size(); ++i) {
        CHECK(r.trace[i] >= r.trace[i - 1] - 1e-9);
      }
    }
  }
}

TEST_CASE("trained rows are probability distributions") {
  std::mt19937_64 rng(9);
  ParallelCorpus corpus = RandomCorpus(rng, 8);
  Model1Options options;
  options.iterations = 4;
  Model1Result r = TrainModel1(corpus, options);
  std::set<std::string> givens = corpus.target_vocab;
  givens.insert(kNullToken);
  for (const auto& given : givens) {
    double sum = 0.0;
    for (const auto& outcome : corpus.source_vocab) {
      sum += r.table.prob(outcome, given);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("inverse direction swaps the table's roles") {
  Model1Options options;
  options.iterations = 1;
  options.use_null = false;
  options.direction = Direction::kInverse;
  Model1Result r = TrainModel1(HandCorpus(), options);
  // Mirror image of the forward fixture: now component tokens are the
  // outcomes and text tokens index the rows.
  CHECK(r.table.prob("haus", "house") == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.table.direction() == Direction::kInverse);
}

TEST_CASE("sentence likelihood equals alignment enumeration") {
  std::mt19937_64 rng(13);
  std::vector<std::string> outcomes{"a", "b", "c", "d"};
  std::vector<std::string> givens{"p", "q", "r"};
  TranslationTable table = testing::RandomTable(rng, outcomes, givens);
  for (int trial = 0; trial < 100; ++trial) {
    TokenSeq x, z;
    int lx = 1 + static_cast<int>(rng() % 4);
    int lz = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < lx; ++i) x.push_back(outcomes[rng() % outcomes.size()]);
    for (int i = 0; i < lz; ++i) z.push_back(givens[rng() % givens.size()]);
    for (bool normalize : {false, true}) {
      double fast = SentenceLikelihood(table, x, z, normalize);
      double slow = AlignmentEnumerationLikelihood(table, x, z, normalize);
      CHECK(std::abs(fast - slow) <= 1e-12 * std::max(1.0, std::abs(slow)));
    }
  }
}

TEST_CASE("unknown lookups fall back to the floor") {
  Model1Options options;
  options.iterations = 1;
  Model1Result r = TrainModel1(HandCorpus(), options);
  CHECK(r.table.prob("the", "unseen") == r.table.floor());
  CHECK(r.table.prob("unseen", "haus") == r.table.floor());
  CHECK(r.table.floor() > 0.0);
}

TEST_CASE("save and load preserve probabilities and metadata") {
  Model1Options options;
  options.iterations = 3;
  options.use_null = true;
  Model1Result r = TrainModel1(HandCorpus(), options);
  TempFile file("table.tsv");
  r.table.Save(file.path());
  TranslationTable loaded = TranslationTable::Load(file.path());
  CHECK(loaded.prob("house", "haus") == r.table.prob("house", "haus"));
  CHECK(loaded.prob("the", kNullToken) == r.table.prob("the", kNullToken));
  CHECK(loaded.direction() == r.table.direction());
  CHECK(loaded.trained_with_null() == r.table.trained_with_null());
  CHECK(loaded.floor() == r.table.floor());
}

TEST_CASE("uniform table fills every cell with 1/|outcomes|") {
  TranslationTable t = UniformTable({"a", "b", "c", "d"}, {"x", "y"});
  CHECK(t.prob("a", "x") == doctest::Approx(0.25));
  CHECK(t.prob("d", "y") == doctest::Approx(0.25));
}
