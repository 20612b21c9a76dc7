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

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dissip {

using Complex = std::complex<double>;

/// Dense 2^q x 2^q complex operator. Qubit 0 is the most significant bit of
/// the basis index, so dense(P0 P1 ... ) = P0 (x) P1 (x) ...
using DenseOperator = Eigen::MatrixXcd;

/// Maximum qubit count for dense realizations. Defaults to 12; the
/// DISSIP_DENSE_LIMIT environment variable or set_dense_qubit_limit overrides it.
int dense_qubit_limit();
void set_dense_qubit_limit(std::optional<int> limit);

/// Throws CapacityError if `qubits` exceeds dense_qubit_limit().
void check_dense_capacity(int qubits, std::string_view what);

/// i^power, power in {0,1,2,3}.
struct Phase {
  std::uint8_t power = 0;

  Complex value() const;
  Phase operator*(Phase other) const { return Phase{static_cast<std::uint8_t>((power + other.power) & 3U)}; }
  bool operator==(const Phase&) const = default;
};

/// Multi-qubit Pauli string in symplectic form. Qubit i carries X iff x(i),
/// Z iff z(i), Y iff both. No phase is stored.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int num_qubits);

  /// Single-site operator; letter is one of 'I', 'X', 'Y', 'Z'.
  static PauliString single(int num_qubits, int qubit, char letter);

  /// Parses encodings like "X1 Z3" (1-based sites). The empty string or "I" is
  /// the identity.
  static PauliString parse(std::string_view encoding, int num_qubits);

  int num_qubits() const { return n_; }
  bool x(int qubit) const;
  bool z(int qubit) const;
  char letter(int qubit) const;
  void set(int qubit, char letter);

  int weight() const;
  /// 0-based qubit indices acted on nontrivially, ascending.
  std::vector<int> support() const;
  std::string encoding() const;

  std::span<const std::uint64_t> x_words() const { return x_; }
  std::span<const std::uint64_t> z_words() const { return z_; }

  bool operator==(const PauliString&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
};

/// a * b = phase * result.
struct PauliProduct {
  PauliString result;
  Phase phase;
};

PauliProduct pauli_mul(const PauliString& a, const PauliString& b);

/// 0 if a and b commute, 1 if they anticommute.
int pauli_commutes(const PauliString& a, const PauliString& b);

/// Product chi_{s1} chi_{s2} ... chi_{sw} of Majorana operators over an
/// ascending mode subset. The mode count must be even.
class MajoranaMonomial {
 public:
  MajoranaMonomial() = default;
  explicit MajoranaMonomial(int num_modes);

  static MajoranaMonomial single(int num_modes, int mode);
  static MajoranaMonomial from_modes(int num_modes, std::span<const int> modes);
  /// Parses "M1 M2 M5" (1-based modes).
  static MajoranaMonomial parse(std::string_view encoding, int num_modes);

  int num_modes() const { return n_; }
  bool contains(int mode) const;
  int weight() const;
  bool even_weight() const { return weight() % 2 == 0; }
  std::vector<int> support() const;
  std::string encoding() const;

  std::span<const std::uint64_t> words() const { return occ_; }

  bool operator==(const MajoranaMonomial&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> occ_;
};

/// chi_A chi_B = (-1)^(|A||B| - |A n B|) chi_B chi_A; returns that exponent mod 2.
int majorana_commutes(const MajoranaMonomial& a, const MajoranaMonomial& b);

/// Jordan-Wigner image: chi_S = phase * result on num_modes/2 qubits, with
/// chi_{2j} = Z...Z X_j and chi_{2j+1} = Z...Z Y_j (0-based modes and qubits).
PauliProduct jordan_wigner(const MajoranaMonomial& m);

DenseOperator to_dense(const PauliString& p, Complex global_phase = 1.0);
DenseOperator to_dense(const MajoranaMonomial& m, Complex global_phase = 1.0);

/// target += coeff * dense(p), in O(2^q).
void accumulate_pauli(DenseOperator& target, const PauliString& p, Complex coeff);

std::vector<int> support(const PauliString& p);
std::vector<int> support(const MajoranaMonomial& m);

bool is_hermitian(const DenseOperator& op, double tol = 1e-12);

}  // namespace dissip
