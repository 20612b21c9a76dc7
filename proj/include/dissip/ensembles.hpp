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
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dissip/op_algebra.hpp"

namespace dissip {

enum class Model { GaussianPauli, Syk, SparsePauli, SparseFermion };

std::string_view model_name(Model model);
Model parse_model(std::string_view name);
bool is_fermionic(Model model);
bool is_sampled(Model model);

/// Jumps per site (a_loc) and anticommuting jumps per term site (a_ac).
struct LocalityConstants {
  int a_loc;
  int a_ac;
};

LocalityConstants locality_constants(Model model);

struct EnsembleSpec {
  Model model = Model::SparsePauli;
  int n = 0;  // qubits for spin models, Majorana modes for fermionic ones
  int k = 0;
  int m = 0;  // sampled models only
  std::uint64_t seed = 0;

  /// Throws ValidationError. Accepts 1 <= k <= n; k and n even for fermions;
  /// m >= 1 for sampled models.
  void validate() const;
  /// True when 1 < k < n, the regime covered by the energy guarantee.
  bool in_theorem_regime() const { return k > 1 && k < n; }
  int qubits() const { return is_fermionic(model) ? n / 2 : n; }
};

using TermOp = std::variant<PauliString, MajoranaMonomial>;

/// Hermitian unit operator realized by a term: the Pauli string itself, or
/// i^{w/2} chi_S for an even-weight Majorana monomial. Returned as a Pauli
/// string with a real sign (phase power 0 or 2).
PauliProduct canonical_pauli(const TermOp& op);
int op_weight(const TermOp& op);
std::vector<int> op_support(const TermOp& op);
std::string op_encoding(const TermOp& op);

/// One summand s * h * op of a Hamiltonian.
struct HamiltonianTerm {
  TermOp op;
  double h = 0.0;
  int s = 1;
  std::vector<int> support;  // 0-based sites, cached

  /// dense(op) with the canonical Hermitian phase, no strength or sign.
  DenseOperator unit_dense() const;
};

struct HamiltonianInstance {
  Model model = Model::SparsePauli;
  int n = 0;
  int k = 0;
  int m = 0;  // number of terms; for Gaussian models the full term count
  std::uint64_t seed = 0;
  std::vector<HamiltonianTerm> terms;
  double h_loc = 0.0;
  double h_glo = 0.0;

  int qubits() const { return is_fermionic(model) ? n / 2 : n; }
};

/// Builds an instance from explicit terms; fills supports and energies.
HamiltonianInstance make_instance(Model model, int n, int k, std::vector<HamiltonianTerm> terms,
                                  std::uint64_t seed = 0);

/// Upper bound on the number of terms a Gaussian model may enumerate.
inline constexpr std::size_t kMaxGaussianTerms = std::size_t{1} << 22;

/// Number of terms in the fully connected model: 3^k C(n,k) or C(n,k).
double gaussian_term_count(Model model, int n, int k);

/// One term per weight-k Pauli, in lexicographic order of (site subset,
/// letters with X<Y<Z and the lowest site varying slowest). Each coupling is
/// g ~ N(0, 3^-k C(n,k)^-1), split as h = |g|, s = sign(g).
HamiltonianInstance sample_gaussian_pauli(const EnsembleSpec& spec);

/// One term per size-k mode subset in lexicographic order, g ~ N(0, C(n,k)^-1).
HamiltonianInstance sample_syk(const EnsembleSpec& spec);

/// m i.i.d. terms: a uniform k-subset, then (Pauli models) a uniform letter
/// per chosen site, then a Rademacher sign. h = 1/sqrt(m). Duplicates are kept.
HamiltonianInstance sample_sparse(const EnsembleSpec& spec);

/// Dispatches on spec.model.
HamiltonianInstance sample_instance(const EnsembleSpec& spec);

struct LocalGlobal {
  double h_loc;
  double h_glo;
};

LocalGlobal local_global_energies(const HamiltonianInstance& instance);

/// sum_gamma s h dense(op); Hermitian.
DenseOperator instance_to_dense(const HamiltonianInstance& instance);

/// Same operators and strengths with the given signs (one per term).
HamiltonianInstance with_signs(const HamiltonianInstance& instance, std::span<const int> signs);

/// {model, n, k, m, seed, terms: [{op, h, s}]}
nlohmann::json instance_to_json(const HamiltonianInstance& instance);
HamiltonianInstance instance_from_json(const nlohmann::json& doc);
std::string serialize_instance(const HamiltonianInstance& instance);

}  // namespace dissip
