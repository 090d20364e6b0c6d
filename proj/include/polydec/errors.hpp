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

#ifndef POLYDEC_ERRORS_H_
#define POLYDEC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace polydec {

// Problems with input data: missing files, malformed lines, empty corpora.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Training failed (divergence, bad hyper-parameters).
class TrainError : public std::runtime_error {
 public:
  explicit TrainError(const std::string& what) : std::runtime_error(what) {}
};

// Decoding failed to reach the goal state (e.g. all paths pruned).
class SearchError : public std::runtime_error {
 public:
  explicit SearchError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polydec

#endif  // POLYDEC_ERRORS_H_
