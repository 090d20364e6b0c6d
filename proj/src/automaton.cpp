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

#include "polydec/automaton.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "polydec/errors.hpp"

namespace polydec {
namespace {

// Mutable trie-like state used during incremental minimal-DAFSA
// construction (sorted input, register of equivalent states).
struct BuildState {
  std::vector<std::pair<std::string, int>> kids;  // insertion order = sorted
  bool final = false;
};

using Signature = std::pair<bool, std::vector<std::pair<std::string, int>>>;

class DafsaBuilder {
 public:
  // Requires lexicographically sorted, de-duplicated, non-empty sequences.
  explicit DafsaBuilder(
      const std::vector<std::vector<std::string>>& sorted_sequences) {
    states_.emplace_back();  // root
    for (const auto& word : sorted_sequences) Add(word);
    ReplaceOrRegister(0);
  }

  const std::vector<BuildState>& states() const { return states_; }

 private:
  void Add(const std::vector<std::string>& word) {
    int node = 0;
    size_t i = 0;
    while (i < word.size()) {
      auto& kids = states_[node].kids;
      if (kids.empty() || kids.back().first != word[i]) break;
      node = kids.back().second;
      ++i;
    }
    // The branch below the common prefix is complete; minimize it before
    // extending the prefix node with a new child.
    ReplaceOrRegister(node);
    for (; i < word.size(); ++i) {
      states_.emplace_back();
      int child = static_cast<int>(states_.size()) - 1;
      states_[node].kids.emplace_back(word[i], child);
      node = child;
    }
    states_[node].final = true;
  }

  void ReplaceOrRegister(int node) {
    if (states_[node].kids.empty()) return;
    auto& last = states_[node].kids.back();
    int child = last.second;
    ReplaceOrRegister(child);
    Signature sig{states_[child].final, states_[child].kids};
    auto [it, inserted] = registry_.emplace(std::move(sig), child);
    if (!inserted) last.second = it->second;
  }

  std::vector<BuildState> states_;
  std::map<Signature, int> registry_;
};

}  // namespace

ComponentGraph ComponentGraph::Build(
    std::vector<std::vector<std::string>> sequences) {
  if (sequences.empty()) {
    throw DataError("cannot build graph from an empty sequence set");
  }
  for (const auto& seq : sequences) {
    if (seq.empty()) throw DataError("cannot build graph: empty sequence");
    for (const auto& label : seq) {
      if (label == kEosLabel) {
        throw DataError(std::string("label '") + kEosLabel + "' is reserved");
      }
    }
  }
  std::sort(sequences.begin(), sequences.end());
  sequences.erase(std::unique(sequences.begin(), sequences.end()),
                  sequences.end());

  DafsaBuilder builder(sequences);
  const auto& states = builder.states();

  // The builder's state ids still include orphaned trie states that were
  // replaced by registered equivalents; reachability from the root prunes
  // them. Final states get an EOS edge into a fresh unique sink.
  int n = static_cast<int>(states.size());
  int sink = n;
  std::vector<std::vector<Edge>> adjacency(n + 1);
  for (int u = 0; u < n; ++u) {
    for (const auto& [label, v] : states[u].kids) {
      adjacency[u].push_back(Edge{v, label});
    }
    if (states[u].final) adjacency[u].push_back(Edge{sink, kEosLabel});
  }

  // Kahn's algorithm restricted to nodes reachable from the root, breaking
  // ties toward the smallest construction id. The root is the only node
  // with in-degree zero and the sink is an ancestor of nothing, so the
  // renumbering puts the source first and the sink last.
  std::vector<int> indegree(n + 1, 0);
  std::vector<bool> reachable(n + 1, false);
  {
    std::vector<int> stack{0};
    reachable[0] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto& e : adjacency[u]) {
        ++indegree[e.to];
        if (!reachable[e.to]) {
          reachable[e.to] = true;
          stack.push_back(e.to);
        }
      }
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  ready.push(0);
  std::vector<int> new_id(n + 1, -1);
  int next = 0;
  while (!ready.empty()) {
    int u = ready.top();
    ready.pop();
    new_id[u] = next++;
    for (const auto& e : adjacency[u]) {
      if (--indegree[e.to] == 0) ready.push(e.to);
    }
  }

  ComponentGraph graph;
  graph.adjacency_.resize(next);
  for (int u = 0; u <= n; ++u) {
    if (!reachable[u]) continue;
    auto& out = graph.adjacency_[new_id[u]];
    for (const auto& e : adjacency[u]) {
      out.push_back(Edge{new_id[e.to], e.label});
      if (e.label != kEosLabel) graph.label_vocab_.insert(e.label);
    }
    std::sort(out.begin(), out.end(),
              [](const Edge& a, const Edge& b) { return a.label < b.label; });
  }
  return graph;
}

ComponentGraph ComponentGraph::Union(
    const std::vector<ComponentGraph>& graphs) {
  std::set<std::vector<std::string>> all;
  for (const auto& g : graphs) {
    auto paths = g.EnumeratePaths(std::numeric_limits<size_t>::max());
    all.insert(paths.begin(), paths.end());
  }
  return Build({all.begin(), all.end()});
}

size_t ComponentGraph::edge_count() const {
  size_t count = 0;
  for (const auto& out : adjacency_) count += out.size();
  return count;
}

int ComponentGraph::LanguageStart(
    const std::optional<std::string>& language_token) const {
  if (!language_token) return source();
  for (const auto& e : Out(source())) {
    if (e.label == *language_token) return e.to;
  }
  std::string available;
  for (const auto& e : Out(source())) {
    if (!available.empty()) available += ", ";
    available += e.label;
  }
  throw DataError("unknown language token '" + *language_token +
                  "'; available: " + available);
}

uint64_t ComponentGraph::CountPaths() const {
  std::vector<uint64_t> paths(adjacency_.size(), 0);
  paths[sink()] = 1;
  for (int u = sink() - 1; u >= 0; --u) {
    for (const auto& e : adjacency_[u]) paths[u] += paths[e.to];
  }
  return paths[source()];
}

std::vector<std::vector<std::string>> ComponentGraph::EnumeratePaths(
    size_t limit) const {
  std::vector<std::vector<std::string>> result;
  std::vector<std::string> path;
  // Adjacency is label-sorted, but byte order of labels does not coincide
  // with lexicographic order of token sequences (a short sequence precedes
  // all its extensions), so collect everything and sort.
  auto dfs = [&](auto&& self, int u) -> void {
    for (const auto& e : adjacency_[u]) {
      if (e.label == kEosLabel) {
        result.push_back(path);
      } else {
        path.push_back(e.label);
        self(self, e.to);
        path.pop_back();
      }
    }
  };
  dfs(dfs, source());
  std::sort(result.begin(), result.end());
  if (result.size() > limit) result.resize(limit);
  return result;
}

bool ComponentGraph::Accepts(const std::vector<std::string>& labels,
                             int start) const {
  int node = start;
  for (const auto& label : labels) {
    const Edge* next = nullptr;
    for (const auto& e : adjacency_[node]) {
      if (e.label == label) {
        next = &e;
        break;
      }
    }
    if (next == nullptr) return false;
    node = next->to;
  }
  for (const auto& e : adjacency_[node]) {
    if (e.label == kEosLabel && e.to == sink()) return true;
  }
  return false;
}

std::string ComponentGraph::ToText() const {
  std::ostringstream out;
  for (int u = 0; u < node_count(); ++u) {
    for (const auto& e : adjacency_[u]) {
      out << u << '\t' << e.to << '\t' << e.label << '\n';
    }
  }
  out << "final\t" << sink() << '\n';
  return out.str();
}

ComponentGraph ComponentGraph::FromText(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::tuple<int, int, std::string>> edges;
  int sink = -1;
  int max_node = -1;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string first;
    std::getline(ls, first, '\t');
    if (first == "final") {
      std::string id;
      std::getline(ls, id);
      sink = std::stoi(id);
      continue;
    }
    std::string to_s, label;
    if (!std::getline(ls, to_s, '\t') || !std::getline(ls, label) ||
        label.empty()) {
      throw DataError("graph text line " + std::to_string(line_no) +
                      ": expected `u TAB v TAB label`");
    }
    int u = std::stoi(first);
    int v = std::stoi(to_s);
    edges.emplace_back(u, v, label);
    max_node = std::max(max_node, std::max(u, v));
  }
  if (sink == -1 || sink != max_node) {
    throw DataError("graph text: missing or inconsistent final line");
  }
  ComponentGraph graph;
  graph.adjacency_.resize(max_node + 1);
  for (auto& [u, v, label] : edges) {
    if (v <= u) throw DataError("graph text: edges must go forward in id order");
    if (label != kEosLabel) graph.label_vocab_.insert(label);
    graph.adjacency_[u].push_back(Edge{v, std::move(label)});
  }
  for (auto& out : graph.adjacency_) {
    std::sort(out.begin(), out.end(),
              [](const Edge& a, const Edge& b) { return a.label < b.label; });
  }
  return graph;
}

void ComponentGraph::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write graph file: " + path);
  out << ToText();
}

ComponentGraph ComponentGraph::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return FromText(buf.str());
}

}  // namespace polydec
