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

#include "polydec/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "polydec/errors.hpp"

namespace polydec {
namespace {

// Splits a UTF-8 string into code points (falling back to single bytes on
// invalid sequences).
std::vector<std::string> SplitChars(const std::string& word) {
  std::vector<std::string> chars;
  size_t i = 0;
  while (i < word.size()) {
    unsigned char c = static_cast<unsigned char>(word[i]);
    size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    if (i + len > word.size()) len = 1;
    chars.push_back(word.substr(i, len));
    i += len;
  }
  return chars;
}

std::vector<std::string> WordSymbols(const std::string& word) {
  auto symbols = SplitChars(word);
  symbols.push_back(kBpeEow);
  return symbols;
}

void MergeInPlace(std::vector<std::string>& symbols,
                  const std::pair<std::string, std::string>& rule) {
  size_t out = 0;
  for (size_t i = 0; i < symbols.size();) {
    if (i + 1 < symbols.size() && symbols[i] == rule.first &&
        symbols[i + 1] == rule.second) {
      symbols[out++] = rule.first + rule.second;
      i += 2;
    } else {
      if (out != i) symbols[out] = std::move(symbols[i]);
      ++out;
      i += 1;
    }
  }
  symbols.resize(out);
}

bool IsLanguageTokenPosition(const Pair& pair, BpeSide word_side, size_t idx) {
  return word_side == BpeSide::kTarget && idx == 0 &&
         pair.language_tag.has_value();
}

void CollectWords(const ParallelCorpus& corpus, BpeSide side,
                  std::map<std::string, size_t>& freq) {
  for (const auto& pair : corpus.pairs) {
    if (side == BpeSide::kSource || side == BpeSide::kBoth) {
      for (const auto& w : pair.source_tokens) ++freq[w];
    }
    if (side == BpeSide::kTarget || side == BpeSide::kBoth) {
      for (size_t i = 0; i < pair.target_tokens.size(); ++i) {
        if (IsLanguageTokenPosition(pair, BpeSide::kTarget, i)) continue;
        ++freq[pair.target_tokens[i]];
      }
    }
  }
}

}  // namespace

BpeModel LearnBpe(const ParallelCorpus& corpus, size_t merge_count,
                  BpeSide side) {
  if (corpus.pairs.empty()) throw DataError("cannot learn BPE: empty corpus");

  std::map<std::string, size_t> freq;
  CollectWords(corpus, side, freq);

  std::vector<std::pair<std::vector<std::string>, size_t>> words;
  words.reserve(freq.size());
  for (const auto& [word, count] : freq) {
    words.emplace_back(WordSymbols(word), count);
  }

  BpeModel model;
  for (size_t m = 0; m < merge_count; ++m) {
    std::map<std::pair<std::string, std::string>, size_t> pair_counts;
    for (const auto& [symbols, count] : words) {
      for (size_t i = 0; i + 1 < symbols.size(); ++i) {
        pair_counts[{symbols[i], symbols[i + 1]}] += count;
      }
    }
    if (pair_counts.empty()) break;
    // Highest frequency wins; std::map iteration order settles ties toward
    // the lexicographically smaller pair.
    auto best = pair_counts.begin();
    for (auto it = pair_counts.begin(); it != pair_counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    model.merges.push_back(best->first);
    for (auto& [symbols, count] : words) MergeInPlace(symbols, best->first);
  }
  return model;
}

TokenSeq BpeModel::Apply(const TokenSeq& tokens) const {
  TokenSeq out;
  for (const auto& token : tokens) {
    if (token.empty()) continue;
    auto symbols = WordSymbols(token);
    for (const auto& rule : merges) MergeInPlace(symbols, rule);
    if (symbols.size() > 1 && symbols.back() == kBpeEow) {
      symbols.pop_back();
      symbols.back() += kBpeEow;
    }
    for (auto& s : symbols) out.push_back(std::move(s));
  }
  return out;
}

TokenSeq BpeModel::Restore(const TokenSeq& units) {
  TokenSeq out;
  std::string word;
  const std::string eow = kBpeEow;
  for (const auto& unit : units) {
    std::string u = unit;
    bool end = false;
    if (u.size() >= eow.size() &&
        u.compare(u.size() - eow.size(), eow.size(), eow) == 0) {
      u.resize(u.size() - eow.size());
      end = true;
    }
    word += u;
    if (end) {
      out.push_back(word);
      word.clear();
    }
  }
  if (!word.empty()) out.push_back(word);  // tolerate a missing final marker
  return out;
}

void BpeModel::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write BPE model: " + path);
  for (const auto& [a, b] : merges) out << a << ' ' << b << '\n';
}

BpeModel BpeModel::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open BPE model: " + path);
  BpeModel model;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a >> b) || (ls >> extra)) {
      throw DataError("BPE model " + path + " line " +
                      std::to_string(line_no) +
                      ": expected two space-separated symbols");
    }
    model.merges.emplace_back(a, b);
  }
  return model;
}

ParallelCorpus ApplyBpeToCorpus(const BpeModel& model,
                                const ParallelCorpus& corpus, BpeSide side) {
  ParallelCorpus out;
  for (const auto& pair : corpus.pairs) {
    Pair p;
    p.language_tag = pair.language_tag;
    if (side == BpeSide::kSource || side == BpeSide::kBoth) {
      p.source_tokens = model.Apply(pair.source_tokens);
    } else {
      p.source_tokens = pair.source_tokens;
    }
    if (side == BpeSide::kTarget || side == BpeSide::kBoth) {
      TokenSeq body(pair.target_tokens.begin() +
                        (pair.language_tag ? 1 : 0),
                    pair.target_tokens.end());
      p.target_tokens = model.Apply(body);
      if (pair.language_tag) {
        p.target_tokens.insert(p.target_tokens.begin(),
                               pair.target_tokens.front());
      }
    } else {
      p.target_tokens = pair.target_tokens;
    }
    for (const auto& t : p.source_tokens) out.source_vocab.insert(t);
    for (const auto& t : p.target_tokens) out.target_vocab.insert(t);
    out.pairs.push_back(std::move(p));
  }
  return out;
}

}  // namespace polydec
