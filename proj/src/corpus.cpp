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

#include "polydec/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "polydec/errors.hpp"

namespace polydec {

std::string MakeLanguageToken(const std::string& name) {
  if (name.empty()) throw DataError("language name must be non-empty");
  return "2" + name;
}

std::optional<std::string> LanguageFromToken(const std::string& token) {
  if (token.size() < 2 || token[0] != '2') return std::nullopt;
  return token.substr(1);
}

TokenSeq SplitWhitespace(const std::string& line) {
  TokenSeq tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> cols;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

void AddPair(ParallelCorpus& corpus, const std::string& source_col,
             const std::string& target_col, const std::string& tag,
             size_t line_no) {
  Pair pair;
  pair.source_tokens = SplitWhitespace(source_col);
  pair.target_tokens = SplitWhitespace(target_col);
  if (pair.source_tokens.empty() || pair.target_tokens.empty()) {
    throw DataError("line " + std::to_string(line_no) +
                    ": empty source or target side");
  }
  if (!tag.empty()) {
    pair.language_tag = tag;
    pair.target_tokens.insert(pair.target_tokens.begin(),
                              MakeLanguageToken(tag));
  }
  for (const auto& t : pair.source_tokens) corpus.source_vocab.insert(t);
  for (const auto& t : pair.target_tokens) corpus.target_vocab.insert(t);
  corpus.pairs.push_back(std::move(pair));
}

}  // namespace

ParallelCorpus LoadCorpus(const std::string& path, TagMode tag_mode) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);

  std::string filename_tag;
  if (tag_mode == TagMode::kFromFilename) {
    std::string base = std::filesystem::path(path).filename().string();
    filename_tag = base.substr(0, base.find('.'));
    if (filename_tag.empty()) {
      throw DataError("cannot derive language tag from filename: " + path);
    }
  }

  ParallelCorpus corpus;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = SplitTabs(line);
    if (cols.size() < 2) {
      throw DataError("line " + std::to_string(line_no) + " of " + path +
                      ": expected at least 2 tab-separated columns, got " +
                      std::to_string(cols.size()));
    }
    std::string tag;
    if (tag_mode == TagMode::kFromColumn) {
      if (cols.size() < 3 || cols[2].empty()) {
        throw DataError("line " + std::to_string(line_no) + " of " + path +
                        ": tag column required but missing");
      }
      tag = cols[2];
    } else if (tag_mode == TagMode::kFromFilename) {
      tag = filename_tag;
    }
    AddPair(corpus, cols[0], cols[1], tag, line_no);
  }
  if (corpus.pairs.empty()) throw DataError("empty corpus file: " + path);
  return corpus;
}

ParallelCorpus MakeCorpus(
    const std::vector<std::tuple<std::string, std::string, std::string>>&
        rows) {
  ParallelCorpus corpus;
  size_t line_no = 0;
  for (const auto& [src, tgt, tag] : rows) {
    AddPair(corpus, src, tgt, tag, ++line_no);
  }
  return corpus;
}

}  // namespace polydec
