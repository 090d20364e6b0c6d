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

#include "polydec/eval.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "polydec/errors.hpp"

namespace polydec {

EvalRecord EvalRecord::Make(TokenSeq input, TokenSeq gold,
                            std::vector<TokenSeq> outputs,
                            std::optional<std::string> tag) {
  EvalRecord record;
  record.input = std::move(input);
  record.gold = std::move(gold);
  record.outputs = std::move(outputs);
  record.tag = std::move(tag);
  for (size_t i = 0; i < record.outputs.size(); ++i) {
    if (record.outputs[i] == record.gold) {
      record.matched_rank = static_cast<int>(i) + 1;
      break;
    }
  }
  return record;
}

namespace {

EvalSummary Summarize(const std::vector<const EvalRecord*>& records) {
  EvalSummary s;
  s.n = records.size();
  size_t outputs = 0, well_formed = 0;
  for (const EvalRecord* r : records) {
    if (r->matched_rank) {
      int rank = *r->matched_rank;
      if (rank <= 1) s.acc_at_1 += 1.0;
      if (rank <= 10) s.acc_at_10 += 1.0;
      s.mrr += 1.0 / static_cast<double>(rank);
    }
    outputs += r->outputs.size();
    well_formed += static_cast<size_t>(r->well_formed_count);
  }
  double n = static_cast<double>(s.n);
  s.acc_at_1 /= n;
  s.acc_at_10 /= n;
  s.mrr /= n;
  s.well_formed_rate =
      outputs == 0 ? 0.0
                   : static_cast<double>(well_formed) /
                         static_cast<double>(outputs);
  return s;
}

}  // namespace

EvalSummary Evaluate(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw DataError("cannot evaluate an empty record list");
  std::vector<const EvalRecord*> all;
  std::map<std::string, std::vector<const EvalRecord*>> by_tag;
  for (const auto& r : records) {
    all.push_back(&r);
    if (r.tag) by_tag[*r.tag].push_back(&r);
  }
  EvalSummary summary = Summarize(all);
  for (const auto& [tag, group] : by_tag) {
    summary.per_tag[tag] = Summarize(group);
  }
  return summary;
}

std::string EvalSummary::ToKeyValueLines() const {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "acc@1\t" << acc_at_1 << '\n';
  out << "acc@10\t" << acc_at_10 << '\n';
  out << "mrr\t" << mrr << '\n';
  out << "well_formed\t" << well_formed_rate << '\n';
  out << "n\t" << n << '\n';
  for (const auto& [tag, s] : per_tag) {
    out << tag << ".acc@1\t" << s.acc_at_1 << '\n';
    out << tag << ".acc@10\t" << s.acc_at_10 << '\n';
    out << tag << ".mrr\t" << s.mrr << '\n';
    out << tag << ".n\t" << s.n << '\n';
  }
  return out.str();
}

std::string EvalSummary::ToTable() const {
  std::ostringstream out;
  out.precision(3);
  out << std::fixed;
  out << "dataset       Acc@1  Acc@10 MRR    WF     N\n";
  auto row = [&out](const std::string& name, const EvalSummary& s) {
    std::string padded = name;
    padded.resize(14, ' ');
    out << padded << s.acc_at_1 << "  " << s.acc_at_10 << "  " << s.mrr
        << "  " << s.well_formed_rate << "  " << s.n << '\n';
  };
  row("all", *this);
  for (const auto& [tag, s] : per_tag) row(tag, s);
  return out.str();
}

SplitResult SplitDataset(const ParallelCorpus& corpus, double train_frac,
                         double dev_frac, double test_frac, uint64_t seed) {
  for (double f : {train_frac, dev_frac, test_frac}) {
    if (f < 0.0 || f > 1.0) throw DataError("split fraction out of [0,1]");
  }
  if (std::abs(train_frac + dev_frac + test_frac - 1.0) > 1e-9) {
    throw DataError("split fractions must sum to 1");
  }

  std::vector<size_t> order(corpus.pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }

  size_t n = order.size();
  size_t n_train = static_cast<size_t>(std::llround(train_frac * n));
  size_t n_dev = static_cast<size_t>(std::llround(dev_frac * n));
  if (n_train + n_dev > n) n_dev = n - n_train;

  SplitResult result;
  auto add = [](ParallelCorpus& c, const Pair& p) {
    c.pairs.push_back(p);
    for (const auto& t : p.source_tokens) c.source_vocab.insert(t);
    for (const auto& t : p.target_tokens) c.target_vocab.insert(t);
  };
  for (size_t i = 0; i < n; ++i) {
    const Pair& p = corpus.pairs[order[i]];
    if (i < n_train) add(result.train, p);
    else if (i < n_train + n_dev) add(result.dev, p);
    else add(result.test, p);
  }
  return result;
}

}  // namespace polydec
