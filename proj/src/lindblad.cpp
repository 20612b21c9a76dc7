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

#include "dissip/lindblad.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "dissip/errors.hpp"

namespace dissip {
namespace {

void check_square(const LindbladianRep& rep, const DenseOperator& x, const char* what) {
  if (x.rows() != rep.dim() || x.cols() != rep.dim()) {
    throw DimensionError(std::string(what) + ": operand is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", generator acts on dimension " + std::to_string(rep.dim()));
  }
}

DenseOperator anticomm(const DenseOperator& a, const DenseOperator& b) { return a * b + b * a; }

}  // namespace

std::vector<TermOp> build_jump_set(Model model, int n) {
  std::vector<TermOp> jumps;
  if (is_fermionic(model)) {
    for (int i = 0; i < n; ++i) jumps.emplace_back(MajoranaMonomial::single(n, i));
  } else {
    for (int i = 0; i < n; ++i) {
      for (char letter : {'X', 'Y', 'Z'}) jumps.emplace_back(PauliString::single(n, i, letter));
    }
  }
  return jumps;
}

std::vector<TermOp> build_jump_set(const HamiltonianInstance& instance) {
  return build_jump_set(instance.model, instance.n);
}

int jump_site(const TermOp& jump) {
  const auto s = op_support(jump);
  if (s.size() != 1) throw ValidationError("jump operator must act on exactly one site");
  return s.front();
}

int b_flag(const TermOp& jump, const TermOp& term) {
  if (const auto* p = std::get_if<PauliString>(&jump)) {
    const auto* t = std::get_if<PauliString>(&term);
    if (t == nullptr) throw ValidationError("b_flag: Pauli jump paired with a Majorana term");
    return pauli_commutes(*p, *t);
  }
  const auto* t = std::get_if<MajoranaMonomial>(&term);
  if (t == nullptr) throw ValidationError("b_flag: Majorana jump paired with a Pauli term");
  return majorana_commutes(std::get<MajoranaMonomial>(jump), *t);
}

BTable compute_b_table(std::span<const TermOp> jumps, const HamiltonianInstance& instance) {
  BTable table(jumps.size(), std::vector<std::uint8_t>(instance.terms.size(), 0));
  for (std::size_t a = 0; a < jumps.size(); ++a) {
    for (std::size_t g = 0; g < instance.terms.size(); ++g) {
      table[a][g] = static_cast<std::uint8_t>(b_flag(jumps[a], instance.terms[g].op));
    }
  }
  return table;
}

LindbladianRep build_lindbladian(const HamiltonianInstance& instance, double y) {
  if (!std::isfinite(y)) throw ValidationError("y must be finite");
  check_dense_capacity(instance.qubits(), "build_lindbladian");
  LindbladianRep rep;
  rep.instance = instance;
  rep.y = y;
  rep.h_dense = instance_to_dense(instance);
  const auto bases = build_jump_set(instance);
  rep.b_table = compute_b_table(bases, instance);
  const Eigen::Index dim = rep.h_dense.rows();
  rep.kdk_sum = DenseOperator::Zero(dim, dim);
  rep.jumps.reserve(bases.size());
  for (std::size_t a = 0; a < bases.size(); ++a) {
    JumpOperator j;
    j.label = static_cast<int>(a);
    j.site = jump_site(bases[a]);
    j.base = bases[a];
    j.a_dense = std::visit([](const auto& o) { return to_dense(o); }, bases[a]);
    j.k_dense = j.a_dense + y * (j.a_dense * rep.h_dense - rep.h_dense * j.a_dense);
    rep.kdk_sum.noalias() += j.k_dense.adjoint() * j.k_dense;
    rep.jumps.push_back(std::move(j));
  }
  return rep;
}

DenseOperator apply_generator(const LindbladianRep& rep, const DenseOperator& rho) {
  check_square(rep, rho, "apply_generator");
  DenseOperator out = -0.5 * (rep.kdk_sum * rho + rho * rep.kdk_sum);
  DenseOperator tmp(rep.dim(), rep.dim());
  for (const auto& j : rep.jumps) {
    tmp.noalias() = j.k_dense * rho;
    out.noalias() += tmp * j.k_dense.adjoint();
  }
  return out;
}

DenseOperator apply_generator_adjoint(const LindbladianRep& rep, const DenseOperator& op) {
  check_square(rep, op, "apply_generator_adjoint");
  DenseOperator out = -0.5 * (rep.kdk_sum * op + op * rep.kdk_sum);
  DenseOperator tmp(rep.dim(), rep.dim());
  for (const auto& j : rep.jumps) {
    tmp.noalias() = j.k_dense.adjoint() * op;
    out.noalias() += tmp * j.k_dense;
  }
  return out;
}

DenseOperator vectorized_generator(const LindbladianRep& rep, Picture picture) {
  const Eigen::Index n = rep.dim();
  if (n > 64) {
    throw CapacityError("vectorized generator at dimension " + std::to_string(n), "max vectorized dimension", 64);
  }
  const DenseOperator id = DenseOperator::Identity(n, n);
  DenseOperator s = -0.5 * (Eigen::kroneckerProduct(id, rep.kdk_sum).eval() +
                            Eigen::kroneckerProduct(rep.kdk_sum.transpose(), id).eval());
  for (const auto& j : rep.jumps) {
    if (picture == Picture::Schrodinger) {
      s += Eigen::kroneckerProduct(j.k_dense.conjugate(), j.k_dense).eval();
    } else {
      s += Eigen::kroneckerProduct(j.k_dense.transpose(), j.k_dense.adjoint()).eval();
    }
  }
  return s;
}

double generator_norm_bound(const LindbladianRep& rep) {
  double total = 0.0;
  for (std::size_t a = 0; a < rep.jumps.size(); ++a) {
    double anti = 0.0;
    for (std::size_t g = 0; g < rep.instance.terms.size(); ++g) {
      if (rep.b_table[a][g] != 0U) anti += rep.instance.terms[g].h;
    }
    const double k_norm = 1.0 + 2.0 * std::abs(rep.y) * anti;
    total += k_norm * k_norm;
  }
  return 2.0 * total;
}

GeneratorDecomposition::GeneratorDecomposition(const LindbladianRep& rep, std::size_t max_terms) : y_(rep.y) {
  const auto& inst = rep.instance;
  if (inst.terms.size() > max_terms) {
    throw CapacityError("generator decomposition with " + std::to_string(inst.terms.size()) + " terms",
                        "max decomposition terms", max_terms);
  }
  const std::size_t m = inst.terms.size();
  for (const auto& j : rep.jumps) a_.push_back(j.a_dense);
  for (const auto& t : inst.terms) terms_.push_back(t.h * t.unit_dense());
  comm_.reserve(a_.size() * m);
  nonzero_.assign(a_.size(), std::vector<std::uint8_t>(m, 0));
  for (std::size_t a = 0; a < a_.size(); ++a) {
    for (std::size_t g = 0; g < m; ++g) {
      DenseOperator c = a_[a] * terms_[g] - terms_[g] * a_[a];
      nonzero_[a][g] = c.cwiseAbs().maxCoeff() > 0.0 ? 1 : 0;
      comm_.push_back(std::move(c));
    }
  }
}

const DenseOperator& GeneratorDecomposition::comm(int a, int gamma) const {
  return comm_[static_cast<std::size_t>(a) * terms_.size() + static_cast<std::size_t>(gamma)];
}

DenseOperator GeneratorDecomposition::l0_jump(int a, const DenseOperator& op) const {
  const auto& A = a_[static_cast<std::size_t>(a)];
  DenseOperator inner = DenseOperator::Identity(op.rows(), op.cols());
  DenseOperator out = A * op * A;
  for (int g = 0; g < num_terms(); ++g) {
    if (nonzero_[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)] == 0U) continue;
    const auto& c = comm(a, g);
    out += y_ * y_ * (c.adjoint() * op * c);
    inner += y_ * y_ * (c.adjoint() * c);
  }
  out -= 0.5 * anticomm(inner, op);
  return out;
}

DenseOperator GeneratorDecomposition::lgamma_jump(int a, int gamma, const DenseOperator& op) const {
  if (nonzero_[static_cast<std::size_t>(a)][static_cast<std::size_t>(gamma)] == 0U) {
    return DenseOperator::Zero(op.rows(), op.cols());
  }
  const auto& A = a_[static_cast<std::size_t>(a)];
  const auto& c = comm(a, gamma);
  return y_ * (c.adjoint() * op * A) + y_ * (A * op * c) - 0.5 * y_ * anticomm(c.adjoint() * A, op) -
         0.5 * y_ * anticomm(A * c, op);
}

DenseOperator GeneratorDecomposition::lgammagamma_jump(int a, int gamma, int gamma2, const DenseOperator& op) const {
  if (gamma == gamma2 || nonzero_[static_cast<std::size_t>(a)][static_cast<std::size_t>(gamma)] == 0U ||
      nonzero_[static_cast<std::size_t>(a)][static_cast<std::size_t>(gamma2)] == 0U) {
    return DenseOperator::Zero(op.rows(), op.cols());
  }
  const auto& c1 = comm(a, gamma);
  const auto& c2 = comm(a, gamma2);
  return y_ * y_ * (c1.adjoint() * op * c2 - 0.5 * anticomm(c1.adjoint() * c2, op));
}

DenseOperator GeneratorDecomposition::l0(const DenseOperator& op) const {
  DenseOperator out = DenseOperator::Zero(op.rows(), op.cols());
  for (int a = 0; a < num_jumps(); ++a) out += l0_jump(a, op);
  return out;
}

DenseOperator GeneratorDecomposition::lgamma(int gamma, const DenseOperator& op) const {
  DenseOperator out = DenseOperator::Zero(op.rows(), op.cols());
  for (int a = 0; a < num_jumps(); ++a) out += lgamma_jump(a, gamma, op);
  return out;
}

DenseOperator GeneratorDecomposition::lgammagamma(int gamma, int gamma2, const DenseOperator& op) const {
  DenseOperator out = DenseOperator::Zero(op.rows(), op.cols());
  for (int a = 0; a < num_jumps(); ++a) {
    out += lgammagamma_jump(a, gamma, gamma2, op) + lgammagamma_jump(a, gamma2, gamma, op);
  }
  return out;
}

DenseOperator GeneratorDecomposition::reassemble(const DenseOperator& op, std::span<const int> signs) const {
  if (signs.size() != terms_.size()) {
    throw DimensionError("reassemble: " + std::to_string(signs.size()) + " signs for " +
                         std::to_string(terms_.size()) + " terms");
  }
  DenseOperator out = l0(op);
  for (int g = 0; g < num_terms(); ++g) {
    out += static_cast<double>(signs[static_cast<std::size_t>(g)]) * lgamma(g, op);
    for (int g2 = g + 1; g2 < num_terms(); ++g2) {
      out += static_cast<double>(signs[static_cast<std::size_t>(g)] * signs[static_cast<std::size_t>(g2)]) *
             lgammagamma(g, g2, op);
    }
  }
  return out;
}

std::vector<GeneratorPiece> GeneratorDecomposition::pieces() const {
  std::vector<GeneratorPiece> out;
  out.push_back({PieceKind::L0, -1, -1, [this](const DenseOperator& o) { return l0(o); }});
  for (int g = 0; g < num_terms(); ++g) {
    out.push_back({PieceKind::LGamma, g, -1, [this, g](const DenseOperator& o) { return lgamma(g, o); }});
  }
  for (int g = 0; g < num_terms(); ++g) {
    for (int g2 = g + 1; g2 < num_terms(); ++g2) {
      out.push_back(
          {PieceKind::LGammaGamma, g, g2, [this, g, g2](const DenseOperator& o) { return lgammagamma(g, g2, o); }});
    }
  }
  return out;
}

GeneratorDecomposition decompose_generator(const LindbladianRep& rep, std::size_t max_terms) {
  return GeneratorDecomposition(rep, max_terms);
}

}  // namespace dissip
