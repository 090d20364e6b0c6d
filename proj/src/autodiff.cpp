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

#include "polydec/autodiff.hpp"

#include <cassert>
#include <cmath>

namespace polydec::ad {

Tape::Expr Tape::Input(Matrix value) {
  Node n;
  n.op = Op::kInput;
  n.val = std::move(value);
  return Push(std::move(n));
}

Tape::Expr Tape::Param(Parameter* p) {
  Node n;
  n.op = Op::kParam;
  n.param = p;
  n.val = p->value;
  return Push(std::move(n));
}

Tape::Expr Tape::ParamRow(Parameter* p, int row) {
  Node n;
  n.op = Op::kParamRow;
  n.param = p;
  n.aux = row;
  n.val = p->value.row(row).transpose();
  return Push(std::move(n));
}

Tape::Expr Tape::MatMul(Expr a, Expr b) {
  Node n;
  n.op = Op::kMatMul;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val * nodes_[b].val;
  return Push(std::move(n));
}

Tape::Expr Tape::Add(Expr a, Expr b) {
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val + nodes_[b].val;
  return Push(std::move(n));
}

Tape::Expr Tape::CMult(Expr a, Expr b) {
  Node n;
  n.op = Op::kCMult;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val.cwiseProduct(nodes_[b].val);
  return Push(std::move(n));
}

Tape::Expr Tape::ScaleByScalar(Expr scalar, Expr m) {
  Node n;
  n.op = Op::kScale;
  n.a = scalar;
  n.b = m;
  n.val = nodes_[scalar].val(0, 0) * nodes_[m].val;
  return Push(std::move(n));
}

Tape::Expr Tape::AddBroadcastScalar(Expr scalar, Expr m) {
  Node n;
  n.op = Op::kAddBroadcast;
  n.a = scalar;
  n.b = m;
  n.val = nodes_[m].val.array() + nodes_[scalar].val(0, 0);
  return Push(std::move(n));
}

Tape::Expr Tape::AddConst(Expr a, double c) {
  Node n;
  n.op = Op::kAddConst;
  n.a = a;
  n.val = nodes_[a].val.array() + c;
  return Push(std::move(n));
}

Tape::Expr Tape::Tanh(Expr a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.val = nodes_[a].val.array().tanh();
  return Push(std::move(n));
}

Tape::Expr Tape::Logistic(Expr a) {
  Node n;
  n.op = Op::kLogistic;
  n.a = a;
  n.val = (1.0 / (1.0 + (-nodes_[a].val.array()).exp()));
  return Push(std::move(n));
}

Tape::Expr Tape::Log(Expr a) {
  Node n;
  n.op = Op::kLog;
  n.a = a;
  n.val = nodes_[a].val.array().log();
  return Push(std::move(n));
}

Tape::Expr Tape::ConcatRows(const std::vector<Expr>& parts) {
  Node n;
  n.op = Op::kConcatRows;
  n.args = parts;
  int rows = 0;
  int cols = static_cast<int>(nodes_[parts.front()].val.cols());
  for (Expr p : parts) rows += static_cast<int>(nodes_[p].val.rows());
  n.val.resize(rows, cols);
  int at = 0;
  for (Expr p : parts) {
    int r = static_cast<int>(nodes_[p].val.rows());
    n.val.middleRows(at, r) = nodes_[p].val;
    at += r;
  }
  return Push(std::move(n));
}

Tape::Expr Tape::SliceRows(Expr a, int start, int len) {
  Node n;
  n.op = Op::kSliceRows;
  n.a = a;
  n.aux = start;
  n.aux2 = len;
  n.val = nodes_[a].val.middleRows(start, len);
  return Push(std::move(n));
}

Tape::Expr Tape::PickRow(Expr a, int row) {
  Node n;
  n.op = Op::kPickRow;
  n.a = a;
  n.aux = row;
  n.val = nodes_[a].val.row(row);
  return Push(std::move(n));
}

Tape::Expr Tape::Softmax(Expr a) {
  Node n;
  n.op = Op::kSoftmax;
  n.a = a;
  const Matrix& x = nodes_[a].val;
  double m = x.maxCoeff();
  Matrix e = (x.array() - m).exp();
  n.val = e / e.sum();
  return Push(std::move(n));
}

Tape::Expr Tape::NegLogSoftmaxSubset(Expr logits, std::vector<int> subset) {
  assert(!subset.empty());
  Node n;
  n.op = Op::kNegLogSoftmaxSubset;
  n.a = logits;
  n.subset = std::move(subset);
  const Matrix& x = nodes_[logits].val;
  double m = x.maxCoeff();
  double lse_all = std::log((x.array() - m).exp().sum()) + m;
  double acc = 0.0;
  for (int k : n.subset) acc += std::exp(x(k, 0) - m);
  double lse_sub = std::log(acc) + m;
  n.val = Matrix::Constant(1, 1, lse_all - lse_sub);
  return Push(std::move(n));
}

void Tape::Backward(Expr loss) {
  assert(nodes_[loss].val.size() == 1);
  for (auto& node : nodes_) {
    node.grad = Matrix::Zero(node.val.rows(), node.val.cols());
  }
  nodes_[loss].grad(0, 0) = 1.0;

  for (int i = loss; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad.isZero(0.0)) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParam:
        n.param->grad += g;
        break;
      case Op::kParamRow:
        n.param->grad.row(n.aux) += g.transpose();
        break;
      case Op::kMatMul:
        nodes_[n.a].grad += g * nodes_[n.b].val.transpose();
        nodes_[n.b].grad += nodes_[n.a].val.transpose() * g;
        break;
      case Op::kAdd:
        nodes_[n.a].grad += g;
        nodes_[n.b].grad += g;
        break;
      case Op::kCMult:
        nodes_[n.a].grad += g.cwiseProduct(nodes_[n.b].val);
        nodes_[n.b].grad += g.cwiseProduct(nodes_[n.a].val);
        break;
      case Op::kScale:
        nodes_[n.a].grad(0, 0) += g.cwiseProduct(nodes_[n.b].val).sum();
        nodes_[n.b].grad += nodes_[n.a].val(0, 0) * g;
        break;
      case Op::kAddBroadcast:
        nodes_[n.a].grad(0, 0) += g.sum();
        nodes_[n.b].grad += g;
        break;
      case Op::kAddConst:
        nodes_[n.a].grad += g;
        break;
      case Op::kTanh:
        nodes_[n.a].grad.array() += g.array() * (1.0 - n.val.array().square());
        break;
      case Op::kLogistic:
        nodes_[n.a].grad.array() +=
            g.array() * n.val.array() * (1.0 - n.val.array());
        break;
      case Op::kLog:
        nodes_[n.a].grad.array() += g.array() / nodes_[n.a].val.array();
        break;
      case Op::kConcatRows: {
        int at = 0;
        for (Expr p : n.args) {
          int r = static_cast<int>(nodes_[p].val.rows());
          nodes_[p].grad += g.middleRows(at, r);
          at += r;
        }
        break;
      }
      case Op::kSliceRows:
        nodes_[n.a].grad.middleRows(n.aux, n.aux2) += g;
        break;
      case Op::kPickRow:
        nodes_[n.a].grad.row(n.aux) += g;
        break;
      case Op::kSoftmax: {
        // da = p .* (dc - <p, dc>)
        const Matrix& p = n.val;
        double dot = p.cwiseProduct(g).sum();
        nodes_[n.a].grad.array() += p.array() * (g.array() - dot);
        break;
      }
      case Op::kNegLogSoftmaxSubset: {
        const Matrix& x = nodes_[n.a].val;
        double gs = g(0, 0);
        double m = x.maxCoeff();
        Matrix e = (x.array() - m).exp();
        double sum_all = e.sum();
        double sum_sub = 0.0;
        for (int k : n.subset) sum_sub += e(k, 0);
        nodes_[n.a].grad += gs * (e / sum_all);
        for (int k : n.subset) {
          nodes_[n.a].grad(k, 0) -= gs * e(k, 0) / sum_sub;
        }
        break;
      }
    }
  }
}

}  // namespace polydec::ad
