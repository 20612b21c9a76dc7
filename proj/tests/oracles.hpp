// Copyright 2026 The dissip Authors
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

// Independent dense constructions used as test oracles. Nothing here calls
// the library's own dense realization.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using C = std::complex<double>;

inline Mat pauli2(char c) {
  Mat m(2, 2);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// letters[i] acts on qubit i; qubit 0 is the leftmost factor.
inline Mat pauli_string(const std::string& letters) {
  Mat m = Mat::Identity(1, 1);
  for (char c : letters) m = kron(m, pauli2(c));
  return m;
}

/// 0-based mode on q qubits: Z..Z X_j for even modes, Z..Z Y_j for odd ones.
inline Mat majorana(int mode, int q) {
  std::string s(static_cast<std::size_t>(q), 'I');
  const int j = mode / 2;
  for (int i = 0; i < j; ++i) s[static_cast<std::size_t>(i)] = 'Z';
  s[static_cast<std::size_t>(j)] = mode % 2 == 0 ? 'X' : 'Y';
  return pauli_string(s);
}

inline Mat majorana_product(const std::vector<int>& modes, int q) {
  Mat m = Mat::Identity(1 << q, 1 << q);
  for (int md : modes) m = m * majorana(md, q);
  return m;
}

inline C naive_trace_product(const Mat& a, const Mat& b) {
  C acc = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
  }
  return acc;
}

inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace oracle
