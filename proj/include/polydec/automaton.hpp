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

#ifndef POLYDEC_AUTOMATON_H_
#define POLYDEC_AUTOMATON_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace polydec {

// Reserved end-of-sequence label; every accepted sequence is terminated by
// one edge with this label into the unique sink node. Never visible in
// decoder output.
inline constexpr const char* kEosLabel = "</s>";

// Minimal deterministic acyclic automaton over component tokens. Node ids
// are assigned in topological order at freeze time: the source is 0 and the
// sink is node_count()-1, so a plain ascending sweep visits nodes in
// topological order.
class ComponentGraph {
 public:
  struct Edge {
    int to;
    std::string label;
  };

  // Builds the minimal DAFSA accepting exactly the given set of non-empty
  // label sequences (duplicates collapse).
  static ComponentGraph Build(
      std::vector<std::vector<std::string>> sequences);

  // Minimal DAFSA accepting the union of the inputs' accepted sets.
  static ComponentGraph Union(const std::vector<ComponentGraph>& graphs);

  int source() const { return 0; }
  int sink() const { return static_cast<int>(adjacency_.size()) - 1; }
  int node_count() const { return static_cast<int>(adjacency_.size()); }
  size_t edge_count() const;

  // Outgoing edges of u, sorted by label.
  const std::vector<Edge>& Out(int u) const { return adjacency_[u]; }

  const std::set<std::string>& label_vocab() const { return label_vocab_; }

  // Start node for decoding: absent token means polyglot (source); present
  // means the node past the matching language edge. Throws on an unknown
  // language token, listing the available ones.
  int LanguageStart(const std::optional<std::string>& language_token) const;

  // Exact number of source->sink paths (= size of the accepted set).
  uint64_t CountPaths() const;

  // Accepted sequences (EOS stripped) in lexicographic order, truncated to
  // limit entries.
  std::vector<std::vector<std::string>> EnumeratePaths(size_t limit) const;

  // True when labels traces a path from start ending with an EOS edge into
  // the sink.
  bool Accepts(const std::vector<std::string>& labels, int start = 0) const;

  // AT&T-style text serialization: `u TAB v TAB label` lines plus a final
  // `final TAB sink` line.
  std::string ToText() const;
  static ComponentGraph FromText(const std::string& text);

  void Save(const std::string& path) const;
  static ComponentGraph Load(const std::string& path);

 private:
  ComponentGraph() = default;

  std::vector<std::vector<Edge>> adjacency_;
  std::set<std::string> label_vocab_;  // excludes the EOS label
};

}  // namespace polydec

#endif  // POLYDEC_AUTOMATON_H_
