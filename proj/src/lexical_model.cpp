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

#include "polydec/lexical_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "polydec/errors.hpp"

namespace polydec {
namespace {

// (outcome tokens, given tokens) view of a pair under a direction.
std::pair<const TokenSeq*, const TokenSeq*> Orient(const Pair& pair,
                                                   Direction direction) {
  if (direction == Direction::kForward) {
    return {&pair.source_tokens, &pair.target_tokens};
  }
  return {&pair.target_tokens, &pair.source_tokens};
}

}  // namespace

struct Model1Trainer {
  static Model1Result Run(const ParallelCorpus& corpus,
                          const Model1Options& options) {
    if (corpus.pairs.empty()) {
      throw DataError("cannot train Model 1 on an empty corpus");
    }
    if (options.iterations < 1) {
      throw DataError("Model 1 needs at least one EM iteration");
    }

    Model1Result result;
    result.table.direction_ = options.direction;
    result.table.trained_with_null_ = options.use_null;
    auto& t = result.table.rows_;

    // Uniform initialization over co-occurring pairs; the null row
    // co-occurs with every outcome token.
    for (const auto& pair : corpus.pairs) {
      auto [outcomes, givens] = Orient(pair, options.direction);
      for (const auto& o : *outcomes) {
        for (const auto& g : *givens) t[g][o] = 0.0;
        if (options.use_null) t[kNullToken][o] = 0.0;
      }
    }
    for (auto& [g, row] : t) {
      double uniform = 1.0 / static_cast<double>(row.size());
      for (auto& [o, p] : row) p = uniform;
    }

    for (int iter = 0; iter < options.iterations; ++iter) {
      // E-step: expected alignment counts.
      std::unordered_map<std::string,
                         std::unordered_map<std::string, double>>
          counts;
      for (const auto& pair : corpus.pairs) {
        auto [outcomes, givens] = Orient(pair, options.direction);
        for (const auto& o : *outcomes) {
          double denom = 0.0;
          for (const auto& g : *givens) denom += t[g][o];
          if (options.use_null) denom += t[kNullToken][o];
          for (const auto& g : *givens) counts[g][o] += t[g][o] / denom;
          if (options.use_null) {
            counts[kNullToken][o] += t[kNullToken][o] / denom;
          }
        }
      }
      // M-step: renormalize each row.
      for (auto& [g, row] : counts) {
        double total = 0.0;
        for (const auto& [o, c] : row) total += c;
        auto& trow = t[g];
        for (auto& [o, p] : trow) p = 0.0;
        for (const auto& [o, c] : row) trow[o] = c / total;
      }
      result.trace.push_back(LogLikelihood(result.table, corpus, options));
    }
    return result;
  }

  static double LogLikelihood(const TranslationTable& table,
                              const ParallelCorpus& corpus,
                              const Model1Options& options) {
    double ll = 0.0;
    for (const auto& pair : corpus.pairs) {
      auto [outcomes, givens] = Orient(pair, options.direction);
      double slots = static_cast<double>(givens->size()) +
                     (options.use_null ? 1.0 : 0.0);
      for (const auto& o : *outcomes) {
        double sum = 0.0;
        for (const auto& g : *givens) sum += table.prob(o, g);
        if (options.use_null) sum += table.prob(o, kNullToken);
        ll += std::log(sum) - std::log(slots);
      }
    }
    return ll;
  }
};

Model1Result TrainModel1(const ParallelCorpus& corpus,
                         const Model1Options& options) {
  return Model1Trainer::Run(corpus, options);
}

double SentenceLikelihood(const TranslationTable& table, const TokenSeq& x,
                          const TokenSeq& z, bool normalize) {
  if (x.empty() || z.empty()) {
    throw DataError("sentence likelihood needs non-empty sequences");
  }
  double product = 1.0;
  for (const auto& xj : x) {
    double sum = table.prob(xj, kNullToken);
    for (const auto& zi : z) sum += table.prob(xj, zi);
    product *= sum;
  }
  if (normalize) {
    product /= std::pow(static_cast<double>(z.size()) + 1.0,
                        static_cast<double>(x.size()));
  }
  return product;
}

TranslationTable UniformTable(const std::vector<std::string>& outcomes,
                              const std::vector<std::string>& givens) {
  TranslationTable table;
  double p = 1.0 / static_cast<double>(outcomes.size());
  for (const auto& g : givens) {
    for (const auto& o : outcomes) table.rows_[g][o] = p;
  }
  return table;
}

void TranslationTable::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write translation table: " + path);
  out << "# direction="
      << (direction_ == Direction::kForward ? "forward" : "inverse") << '\n';
  out << "# floor=" << floor_ << '\n';
  out << "# null=" << (trained_with_null_ ? 1 : 0) << '\n';
  out.precision(17);
  std::map<std::string, std::map<std::string, double>> sorted;
  for (const auto& [g, row] : rows_) {
    sorted[g] = {row.begin(), row.end()};
  }
  for (const auto& [g, row] : sorted) {
    for (const auto& [o, p] : row) {
      out << g << '\t' << o << '\t' << p << '\n';
    }
  }
}

TranslationTable TranslationTable::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open translation table: " + path);
  TranslationTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string kv;
      while (hs >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        if (key == "direction") {
          table.direction_ =
              value == "inverse" ? Direction::kInverse : Direction::kForward;
        } else if (key == "floor") {
          table.floor_ = std::stod(value);
        } else if (key == "null") {
          table.trained_with_null_ = value != "0";
        }
      }
      continue;
    }
    std::istringstream ls(line);
    std::string g, o, p;
    if (!std::getline(ls, g, '\t') || !std::getline(ls, o, '\t') ||
        !std::getline(ls, p)) {
      throw DataError("translation table " + path + " line " +
                      std::to_string(line_no) +
                      ": expected `given TAB outcome TAB prob`");
    }
    table.rows_[g][o] = std::stod(p);
  }
  return table;
}

}  // namespace polydec
