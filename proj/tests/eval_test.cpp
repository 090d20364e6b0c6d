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
#include "polydec/errors.hpp"
#include "polydec/eval.hpp"

using namespace polydec;

namespace {

EvalRecord RecordWithRank(int rank, int list_len = 10) {
  TokenSeq gold{"g", std::to_string(rank)};
  std::vector<TokenSeq> outputs;
  for (int i = 1; i <= list_len; ++i) {
    outputs.push_back(i == rank ? gold : TokenSeq{"other", std::to_string(i)});
  }
  return EvalRecord::Make({"x"}, gold, outputs);
}

EvalRecord MissRecord() {
  return EvalRecord::Make({"x"}, {"gold"}, {{"a"}, {"b"}});
}

}  // namespace

TEST_CASE("reciprocal ranks 1, 2, 4 average to 7/12") {
  std::vector<EvalRecord> records{RecordWithRank(1), RecordWithRank(2),
                                  RecordWithRank(4)};
  EvalSummary s = Evaluate(records);
  CHECK(std::abs(s.mrr - 7.0 / 12.0) <= 1e-9);
  CHECK(std::abs(s.mrr - 0.583333333333) <= 1e-9);
  CHECK(s.acc_at_1 == doctest::Approx(1.0 / 3.0));
  CHECK(s.acc_at_10 == doctest::Approx(1.0));
}

TEST_CASE("misses contribute zero reciprocal rank") {
  std::vector<EvalRecord> records{RecordWithRank(1), MissRecord()};
  EvalSummary s = Evaluate(records);
  CHECK(s.mrr == doctest::Approx(0.5));
  CHECK(s.acc_at_1 == doctest::Approx(0.5));
  CHECK(s.acc_at_10 == doctest::Approx(0.5));
}

TEST_CASE("rank detection takes the first exact match") {
  TokenSeq gold{"a", "b"};
  EvalRecord r = EvalRecord::Make({"x"}, gold, {{"c"}, gold, gold});
  REQUIRE(r.matched_rank.has_value());
  CHECK(*r.matched_rank == 2);
  CHECK(!MissRecord().matched_rank.has_value());
}

TEST_CASE("metrics satisfy their bounds on random profiles") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EvalRecord> records;
    int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      if (rng() % 3 == 0) {
        records.push_back(MissRecord());
      } else {
        records.push_back(RecordWithRank(1 + static_cast<int>(rng() % 12),
                                         12));
      }
    }
    EvalSummary s = Evaluate(records);
    CHECK(s.acc_at_1 >= 0.0);
    CHECK(s.acc_at_1 <= s.acc_at_10);
    CHECK(s.acc_at_10 <= 1.0);
    CHECK(s.mrr >= s.acc_at_1 - 1e-12);
    CHECK(s.mrr <= 1.0);

    // Independent recomputation from the raw ranks.
    double mrr = 0.0;
    for (const auto& r : records) {
      if (r.matched_rank) mrr += 1.0 / *r.matched_rank;
    }
    mrr /= static_cast<double>(records.size());
    CHECK(s.mrr == doctest::Approx(mrr).epsilon(1e-12));
  }
}

TEST_CASE("per-tag breakdown partitions the records") {
  auto tagged = [](int rank, const std::string& tag) {
    EvalRecord r = RecordWithRank(rank);
    r.tag = tag;
    return r;
  };
  std::vector<EvalRecord> records{tagged(1, "C"), tagged(2, "C"),
                                  tagged(1, "Haskell")};
  EvalSummary s = Evaluate(records);
  REQUIRE(s.per_tag.size() == 2);
  CHECK(s.per_tag.at("C").n == 2);
  CHECK(s.per_tag.at("C").mrr == doctest::Approx(0.75));
  CHECK(s.per_tag.at("Haskell").acc_at_1 == doctest::Approx(1.0));
  CHECK(s.n == 3);
}

TEST_CASE("well-formed rate averages over all emitted outputs") {
  EvalRecord a = RecordWithRank(1, 4);
  a.well_formed_count = 4;
  EvalRecord b = MissRecord();  // two outputs
  b.well_formed_count = 1;
  EvalSummary s = Evaluate({a, b});
  CHECK(s.well_formed_rate == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("report formats include every metric") {
  EvalSummary s = Evaluate({RecordWithRank(1)});
  std::string kv = s.ToKeyValueLines();
  CHECK(kv.find("acc@1\t") != std::string::npos);
  CHECK(kv.find("mrr\t") != std::string::npos);
  CHECK(s.ToTable().find("Acc@1") != std::string::npos);
}

TEST_CASE("evaluating nothing is an error") {
  CHECK_THROWS_AS(Evaluate({}), DataError);
}

TEST_CASE("splits are sized, disjoint, and seed-stable") {
  std::vector<std::tuple<std::string, std::string, std::string>> rows;
  for (int i = 0; i < 100; ++i) {
    rows.emplace_back("src " + std::to_string(i), "tgt " + std::to_string(i),
                      "");
  }
  ParallelCorpus corpus = MakeCorpus(rows);
  SplitResult a = SplitDataset(corpus, 0.8, 0.1, 0.1, 42);
  CHECK(a.train.pairs.size() == 80);
  CHECK(a.dev.pairs.size() == 10);
  CHECK(a.test.pairs.size() == 10);

  std::set<TokenSeq> seen;
  for (const auto* split : {&a.train, &a.dev, &a.test}) {
    for (const auto& p : split->pairs) {
      CHECK(seen.insert(p.source_tokens).second);
    }
  }
  CHECK(seen.size() == 100);

  SplitResult b = SplitDataset(corpus, 0.8, 0.1, 0.1, 42);
  REQUIRE(b.train.pairs.size() == a.train.pairs.size());
  for (size_t i = 0; i < a.train.pairs.size(); ++i) {
    CHECK(a.train.pairs[i].source_tokens == b.train.pairs[i].source_tokens);
  }

  SplitResult c = SplitDataset(corpus, 0.8, 0.1, 0.1, 43);
  bool differs = false;
  for (size_t i = 0; i < a.train.pairs.size(); ++i) {
    if (a.train.pairs[i].source_tokens != c.train.pairs[i].source_tokens) {
      differs = true;
      break;
    }
  }
  CHECK(differs);

  CHECK_THROWS_AS(SplitDataset(corpus, 0.8, 0.3, 0.1, 1), DataError);
  CHECK_THROWS_AS(SplitDataset(corpus, 1.2, -0.1, -0.1, 1), DataError);
}
