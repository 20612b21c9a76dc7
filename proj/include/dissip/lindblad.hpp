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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dissip/ensembles.hpp"
#include "dissip/op_algebra.hpp"

namespace dissip {

/// Single-site jumps: X,Y,Z on every qubit (site-major) for spin models,
/// every single Majorana for fermionic ones.
std::vector<TermOp> build_jump_set(Model model, int n);
std::vector<TermOp> build_jump_set(const HamiltonianInstance& instance);

/// Site of a single-site jump.
int jump_site(const TermOp& jump);

/// 0 if the jump commutes with the term, 1 if it anticommutes.
int b_flag(const TermOp& jump, const TermOp& term);

/// b[a][gamma], computed symbolically (no dense matrices).
using BTable = std::vector<std::vector<std::uint8_t>>;
BTable compute_b_table(std::span<const TermOp> jumps, const HamiltonianInstance& instance);

struct JumpOperator {
  int label = 0;
  int site = 0;
  TermOp base;
  DenseOperator a_dense;  // A
  DenseOperator k_dense;  // K = A + y [A, H]
};

/// Dense realization of the generator
///   L(rho) = sum_a K rho K^dag - 1/2 {K^dag K, rho}.
/// Treated as immutable once built.
struct LindbladianRep {
  HamiltonianInstance instance;
  double y = 0.0;
  std::vector<JumpOperator> jumps;
  BTable b_table;
  DenseOperator h_dense;
  DenseOperator kdk_sum;  // sum_a K^dag K

  Eigen::Index dim() const { return h_dense.rows(); }
};

LindbladianRep build_lindbladian(const HamiltonianInstance& instance, double y);

/// Schrodinger picture L(rho).
DenseOperator apply_generator(const LindbladianRep& rep, const DenseOperator& rho);

/// Heisenberg picture L^dag(O) = sum_a K^dag O K - 1/2 {K^dag K, O}.
DenseOperator apply_generator_adjoint(const LindbladianRep& rep, const DenseOperator& op);

enum class Picture { Schrodinger, Heisenberg };

/// N^2 x N^2 matrix of the generator acting on column-stacked vec(X).
DenseOperator vectorized_generator(const LindbladianRep& rep, Picture picture);

/// Bound on the induced operator norm of L: 2 sum_a (1 + 2|y| sum_{gamma: b=1} h)^2.
double generator_norm_bound(const LindbladianRep& rep);

enum class PieceKind { L0, LGamma, LGammaGamma };

struct GeneratorPiece {
  PieceKind kind = PieceKind::L0;
  int gamma = -1;
  int gamma2 = -1;
  std::function<DenseOperator(const DenseOperator&)> apply;
};

/// Heisenberg generator written as a degree-two polynomial in the term signs,
///   L^dag = L0 + sum_g s_g L_g + sum_{g<g'} s_g s_g' L_gg',
/// with L_gg' symmetrized over its two labels and the g = g' diagonal kept in
/// L0. Pieces are evaluated from the commutators C_ag = [A^a, h_g op_g].
class GeneratorDecomposition {
 public:
  static constexpr std::size_t kDefaultMaxTerms = 64;

  explicit GeneratorDecomposition(const LindbladianRep& rep, std::size_t max_terms = kDefaultMaxTerms);

  int num_jumps() const { return static_cast<int>(a_.size()); }
  int num_terms() const { return static_cast<int>(terms_.size()); }
  double y() const { return y_; }

  DenseOperator l0_jump(int a, const DenseOperator& op) const;
  DenseOperator lgamma_jump(int a, int gamma, const DenseOperator& op) const;
  /// Unsymmetrized single-jump cross piece; zero when gamma == gamma2.
  DenseOperator lgammagamma_jump(int a, int gamma, int gamma2, const DenseOperator& op) const;

  DenseOperator l0(const DenseOperator& op) const;
  DenseOperator lgamma(int gamma, const DenseOperator& op) const;
  /// sum_a (L^a_{g g'} + L^a_{g' g}).
  DenseOperator lgammagamma(int gamma, int gamma2, const DenseOperator& op) const;

  /// Evaluates the polynomial at the given signs.
  DenseOperator reassemble(const DenseOperator& op, std::span<const int> signs) const;

  std::vector<GeneratorPiece> pieces() const;

  /// Unsigned term h_g dense(op_g).
  const DenseOperator& term(int gamma) const { return terms_[static_cast<std::size_t>(gamma)]; }

 private:
  const DenseOperator& comm(int a, int gamma) const;

  double y_;
  std::vector<DenseOperator> a_;
  std::vector<DenseOperator> terms_;
  std::vector<DenseOperator> comm_;  // [a * m + gamma]
  std::vector<std::vector<std::uint8_t>> nonzero_;
};

GeneratorDecomposition decompose_generator(const LindbladianRep& rep,
                                           std::size_t max_terms = GeneratorDecomposition::kDefaultMaxTerms);

}  // namespace dissip
