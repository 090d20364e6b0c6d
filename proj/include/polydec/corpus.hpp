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

#ifndef POLYDEC_CORPUS_H_
#define POLYDEC_CORPUS_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace polydec {

using TokenSeq = std::vector<std::string>;

// One parallel example: a natural language description paired with the
// component token sequence it should translate to. When a language tag is
// present the first target token is the artificial token derived from it.
struct Pair {
  TokenSeq source_tokens;
  TokenSeq target_tokens;
  std::optional<std::string> language_tag;
};

struct ParallelCorpus {
  std::vector<Pair> pairs;
  std::set<std::string> source_vocab;
  std::set<std::string> target_vocab;
};

enum class TagMode { kNone, kFromColumn, kFromFilename };

// Artificial language-identifier token: "C" -> "2C".
std::string MakeLanguageToken(const std::string& name);

// Inverse of MakeLanguageToken; empty optional if the token is not of the
// artificial "2<Name>" form.
std::optional<std::string> LanguageFromToken(const std::string& token);

// Reads a tab-separated corpus file: source TAB target [TAB tag], one pair
// per line, tokens separated by whitespace. With TagMode::kFromColumn the
// third column supplies the tag; with kFromFilename the file's base name
// (up to the first '.') does. The artificial token is prepended to each
// target sequence whenever a tag is resolved.
ParallelCorpus LoadCorpus(const std::string& path, TagMode tag_mode);

// Builds a corpus in memory from (source line, target line, tag) triples.
ParallelCorpus MakeCorpus(
    const std::vector<std::tuple<std::string, std::string, std::string>>&
        rows);

TokenSeq SplitWhitespace(const std::string& line);

}  // namespace polydec

#endif  // POLYDEC_CORPUS_H_
