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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dissip/ensembles.hpp"
#include "dissip/evolution.hpp"
#include "dissip/lindblad.hpp"
#include "dissip/rng.hpp"

namespace dissip {

/// Re Tr[rho H]. Throws NumericalError if the imaginary part exceeds 1e-10.
double energy(const DenseOperator& rho, const DenseOperator& h);

/// Tr(O) / Tr(I).
Complex normalized_trace(const DenseOperator& op);

/// Closed-form first-order energy gain -8 y t h_glo^2 a_ac k.
double first_order_term(const HamiltonianInstance& instance, double y, double t);

/// Largest eigenvalue of a Hermitian operator (full eigensolve).
double max_eigenvalue(const DenseOperator& h);

/// Tr[H e^{Lt}(mu)] starting from the maximally mixed state.
double achieved_energy(const LindbladianRep& rep, const EvolutionConfig& cfg);

struct EnergyReport {
  double achieved = 0.0;
  double t1_prediction = 0.0;
  double residual = 0.0;
  double lambda_max = 0.0;
  double ratio = 0.0;
  double y = 0.0;
  double t = 0.0;
};

nlohmann::json to_json(const EnergyReport& report);

/// Evolves mu for cfg.t_final and compares against T1 and lambda_max.
EnergyReport energy_report(const LindbladianRep& rep, const EvolutionConfig& cfg);

/// Per-(jump, term) first-order contribution Tr-bar[L^a_g(H_g)] evaluated
/// densely, next to its closed form -8 b_ag h_g^2 y.
struct FirstOrderEntry {
  int a = 0;
  int gamma = 0;
  double dense = 0.0;
  double closed_form = 0.0;
};

std::vector<FirstOrderEntry> first_order_entries(const LindbladianRep& rep, const GeneratorDecomposition& decomp);

enum class SignMode { Enumerate, Sample };

struct RademacherConfig {
  SignMode mode = SignMode::Enumerate;
  int samples = 256;  // sample mode
  std::uint64_t seed = 0;
  std::size_t max_enumerate_terms = 20;
  EvolutionConfig evolution;  // t_final is overridden per call
};

struct AverageEnergy {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::size_t patterns = 0;
};

/// Mean achieved energy over term signs with operators and strengths held
/// fixed: all 2^m patterns (enumerate) or random patterns (sample).
AverageEnergy rademacher_average_energy(const HamiltonianInstance& family, double y, double t,
                                        const RademacherConfig& cfg);

/// Two-point Richardson estimate of d/dt of the sign-averaged energy at 0:
/// 2 f(t0/2)/(t0/2) - f(t0)/t0.
double small_t_slope(const HamiltonianInstance& family, double y, double t0, const RademacherConfig& cfg);

struct ResidualRow {
  double t = 0.0;
  double mean_energy = 0.0;
  double t1 = 0.0;
  double residual = 0.0;
  double residual_over_t2 = 0.0;
};

struct ResidualScan {
  std::vector<ResidualRow> rows;   // t descending
  std::vector<double> halving_ratios;  // (residual/t^2)[i+1] / (residual/t^2)[i]
  double constant = 0.0;           // residual/t^2 at the smallest t
  double reference = 0.0;          // |y| a_loc^2 k^2 h_glo^2
};

ResidualScan second_order_residual_scan(const HamiltonianInstance& family, double y, std::span<const double> t_grid,
                                        const RademacherConfig& cfg);

/// y = -c_y / (sqrt(k) h_loc), t = c_t / k.
struct Schedule {
  double c_y = 0.0;
  double c_t = 0.0;
  double y = 0.0;
  double t = 0.0;
  bool time_guard_ok = false;      // a_loc k t < 1
  bool coupling_guard_ok = false;  // y^2 h_loc^2 a_loc k < 1/8

  bool guards_ok() const { return time_guard_ok && coupling_guard_ok; }
};

double default_c_y(Model model);  // 1 / (3 sqrt(a_loc))
double default_c_t(Model model);  // 1 / (2 a_loc)

Schedule schedule(const HamiltonianInstance& instance, std::optional<double> c_y = std::nullopt,
                  std::optional<double> c_t = std::nullopt);

struct RatioCell {
  Model model = Model::SparsePauli;
  int n = 0;
  int k = 0;
  int m = 0;
};

struct RatioRow {
  RatioCell cell;
  int draws = 0;
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

/// m = ceil(4 n ln n / k).
int sparse_m_rule(int n, int k);

/// Mean of h_glo^2 / h_loc per cell, from supports and strengths only. Draw
/// seeds are derive_seed(master_seed, cell index, draw).
std::vector<RatioRow> glo_loc_ratio_stats(std::span<const RatioCell> cells, int draws, std::uint64_t master_seed);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

DenseOperator random_hermitian(Eigen::Index dim, Rng& rng);

enum class Severity { Error, Warning };

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Severity severity = Severity::Error;
  std::string detail;
};

struct BoundCheckReport {
  std::vector<BoundCheck> checks;

  /// Records lhs <= rhs + tolerance.
  void add(std::string name, double lhs, double rhs, double tolerance, Severity severity = Severity::Error,
           std::string detail = {});
  void append(const BoundCheckReport& other);
  /// True when every Error-severity check passed; warnings never fail a report.
  bool all_pass() const;
  std::size_t failures() const;
  std::size_t warnings() const;
};

nlohmann::json to_json(const BoundCheckReport& report);

// Individual checks. Each appends one or more entries to `report`.

/// [A^a, H_g] == 2 b_ag A^a H_g for every jump and term.
void check_commutation_condition(const LindbladianRep& rep, BoundCheckReport& report);

/// sum_a b_ag == a_ac k for every term; |A_Z| == a_loc |Z| for singletons and the full site set.
void check_locality_condition(const HamiltonianInstance& instance, std::span<const TermOp> jumps, const BTable& b_table,
                              BoundCheckReport& report);

/// Sampled norms of L_g and L_gg' against 8|y| sum_a b h and 8 y^2 sum_a b b' h h'.
void check_piece_norm_bounds(const LindbladianRep& rep, const GeneratorDecomposition& decomp, int test_ops, Rng& rng,
                             BoundCheckReport& report);

/// sum_a sum_g b_ag' b_ag h_g^2 <= a_loc k h_loc^2 for every g'.
void check_b_sum_lemma(const LindbladianRep& rep, BoundCheckReport& report);

/// Per-entry and summed first-order identities.
void check_first_order(const LindbladianRep& rep, const GeneratorDecomposition& decomp, BoundCheckReport& report);

/// lambda_max <= sqrt(8 ln(2N/delta)).
void check_hoeffding_tail(double lambda_max, double dim, double delta, BoundCheckReport& report);

/// Choi positivity, trace preservation and operator-norm contraction at time t.
void check_channel(const LindbladianRep& rep, double t, int test_ops, Rng& rng, BoundCheckReport& report);

/// Tr[H e^{Lt}(mu)] == Tr-bar[e^{L^dag t}(H)].
void check_duality(const LindbladianRep& rep, const EvolutionConfig& cfg, BoundCheckReport& report);

/// Warning-severity entries for the two schedule guards.
void check_schedule_guards(const HamiltonianInstance& instance, const Schedule& s, BoundCheckReport& report);

}  // namespace dissip
