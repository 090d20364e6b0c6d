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

#ifndef POLYDEC_AUTODIFF_H_
#define POLYDEC_AUTODIFF_H_

#include <Eigen/Core>
#include <string>
#include <vector>

namespace polydec::ad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A named trainable array. Gradients accumulate across Tape::Backward calls
// until ZeroGrad.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)),
        value(Matrix::Zero(rows, cols)),
        grad(Matrix::Zero(rows, cols)) {}

  void ZeroGrad() { grad.setZero(); }
};

// Reverse-mode tape over dense 64-bit matrices. Expressions are indices
// into the tape; a tape is built forward per evaluation and discarded.
class Tape {
 public:
  using Expr = int;

  Expr Input(Matrix value);
  Expr Param(Parameter* p);
  // Row r of p as a column vector (embedding lookup).
  Expr ParamRow(Parameter* p, int row);

  Expr MatMul(Expr a, Expr b);
  Expr Add(Expr a, Expr b);
  Expr CMult(Expr a, Expr b);
  // scalar is a 1x1 expression broadcast over m.
  Expr ScaleByScalar(Expr scalar, Expr m);
  Expr AddBroadcastScalar(Expr scalar, Expr m);
  Expr AddConst(Expr a, double c);
  Expr Tanh(Expr a);
  Expr Logistic(Expr a);
  Expr Log(Expr a);
  Expr ConcatRows(const std::vector<Expr>& parts);
  Expr SliceRows(Expr a, int start, int len);
  Expr PickRow(Expr a, int row);
  // Column-vector softmax.
  Expr Softmax(Expr a);
  // Stable -log sum_{k in subset} softmax(logits)[k]; logits is a column
  // vector, the subset must be non-empty.
  Expr NegLogSoftmaxSubset(Expr logits, std::vector<int> subset);

  Expr Affine(Expr w, Expr x, Expr b) { return Add(MatMul(w, x), b); }

  const Matrix& value(Expr e) const { return nodes_[e].val; }
  double scalar(Expr e) const { return nodes_[e].val(0, 0); }
  size_t size() const { return nodes_.size(); }

  // Accumulates d(loss)/d(param) into every reachable Parameter's grad.
  // loss must be 1x1.
  void Backward(Expr loss);

 private:
  enum class Op {
    kInput,
    kParam,
    kParamRow,
    kMatMul,
    kAdd,
    kCMult,
    kScale,
    kAddBroadcast,
    kAddConst,
    kTanh,
    kLogistic,
    kLog,
    kConcatRows,
    kSliceRows,
    kPickRow,
    kSoftmax,
    kNegLogSoftmaxSubset,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    Matrix val;
    Matrix grad;
    Parameter* param = nullptr;
    int aux = 0;
    int aux2 = 0;
    std::vector<int> args;     // for ConcatRows
    std::vector<int> subset;   // for NegLogSoftmaxSubset
  };

  Expr Push(Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<Expr>(nodes_.size()) - 1;
  }

  std::vector<Node> nodes_;
};

}  // namespace polydec::ad

#endif  // POLYDEC_AUTODIFF_H_
