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

#ifndef POLYDEC_TRANSLATION_H_
#define POLYDEC_TRANSLATION_H_

#include <optional>
#include <string>
#include <vector>

namespace polydec {

// A decoded well-formed output path. Labels are the edge labels from the
// decode start node to the sink with the EOS edge stripped; a leading
// artificial language token (polyglot mode) is kept in labels and echoed in
// `language`. Scores are negative log probabilities.
struct Translation {
  std::vector<std::string> labels;
  double score = 0.0;
  std::optional<std::string> language;

  // Labels without the leading artificial token, for presentation and
  // exact-match evaluation.
  std::vector<std::string> SurfaceLabels() const {
    if (language && !labels.empty()) {
      return {labels.begin() + 1, labels.end()};
    }
    return labels;
  }
};

// Per-decode instrumentation; visit counts stay linear in the graph size.
struct DecodeStats {
  size_t nodes_visited = 0;
  size_t edges_scored = 0;
  size_t edges_pruned = 0;
  size_t state_clobbers = 0;
  size_t unknown_labels = 0;
};

}  // namespace polydec

#endif  // POLYDEC_TRANSLATION_H_
