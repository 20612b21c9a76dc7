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

#include <doctest.h>

#include <cmath>

#include "dissip/analysis.hpp"
#include "dissip/errors.hpp"
#include "oracles.hpp"

using namespace dissip;
using oracle::max_abs;

namespace {

HamiltonianTerm pauli_term(const char* enc, int n, double h, int s = 1) {
  return HamiltonianTerm{PauliString::parse(enc, n), h, s, {}};
}

RademacherConfig expm_enumerate() {
  RademacherConfig rc;
  rc.mode = SignMode::Enumerate;
  rc.evolution.method = Method::Expm;
  return rc;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("energy") {
  Rng rng(1);
  const auto h = instance_to_dense(sample_sparse({Model::SparsePauli, 3, 2, 4, 1}));
  CHECK(std::abs(energy(maximally_mixed(3).rho, h)) < 1e-15);
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(h);
  const Eigen::VectorXcd top = es.eigenvectors().col(7);
  CHECK(energy(top * top.adjoint(), h) == doctest::Approx(es.eigenvalues()(7)));
  for (int i = 0; i < 5; ++i) {
    const auto a = random_hermitian(8, rng);
    const auto b = random_hermitian(8, rng);
    CHECK(energy(a, b) == doctest::Approx(oracle::naive_trace_product(a, b).real()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(energy(DenseOperator::Identity(2, 2), h), DimensionError);
}

TEST_CASE("first order term closed form") {
  const auto inst = make_instance(Model::SparsePauli, 2, 2, {pauli_term("X1 X2", 2, 1.0)});
  CHECK(first_order_term(inst, 0.0, 0.3) == 0.0);
  CHECK(first_order_term(inst, -0.1, 0.05) == doctest::Approx(0.16));
  CHECK(first_order_term(inst, -0.1, 0.05) > 0.0);
}

TEST_CASE("per-entry first order identity") {
  for (Model m : {Model::GaussianPauli, Model::Syk, Model::SparsePauli, Model::SparseFermion}) {
    const int n = is_fermionic(m) ? 6 : 3;
    const auto inst = sample_instance({m, n, 2, 4, 17});
    const auto rep = build_lindbladian(inst, -0.13);
    const auto d = decompose_generator(rep);
    double total = 0.0;
    for (const auto& e : first_order_entries(rep, d)) {
      CHECK(std::abs(e.dense - e.closed_form) < 1e-10);
      total += e.dense;
    }
    CHECK(std::abs(total - first_order_term(inst, -0.13, 1.0)) < 1e-9);
  }
}

TEST_CASE("max eigenvalue") {
  CHECK(max_eigenvalue(oracle::pauli2('Z')) == doctest::Approx(1.0));
  CHECK(max_eigenvalue((oracle::pauli2('X') + oracle::pauli2('Z')) / std::sqrt(2.0)) == doctest::Approx(1.0));
}

TEST_CASE("Rademacher average") {
  const auto family = sample_sparse({Model::SparsePauli, 3, 2, 4, 2});
  auto rc = expm_enumerate();
  const auto zero = rademacher_average_energy(family, -0.2, 0.0, rc);
  CHECK(zero.patterns == 16);
  CHECK(std::abs(zero.mean) < 1e-15);
  rc.max_enumerate_terms = 3;
  CHECK_THROWS_AS(rademacher_average_energy(family, -0.2, 0.1, rc), CapacityError);
  rc = expm_enumerate();
  rc.mode = SignMode::Sample;
  rc.samples = 64;
  const auto sampled = rademacher_average_energy(family, -0.2, 0.05, rc);
  const auto exact = rademacher_average_energy(family, -0.2, 0.05, expm_enumerate());
  CHECK(std::abs(sampled.mean - exact.mean) < 5.0 * sampled.stderr_of_mean + 1e-12);
}

TEST_CASE("single term sign symmetry") {
  // conjugation by a Pauli anticommuting with the term maps s to -s and fixes mu
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto family = sample_sparse({Model::SparsePauli, 3, 2, 1, seed});
    EvolutionConfig cfg;
    cfg.method = Method::Expm;
    cfg.t_final = 0.3;
    const double plus = achieved_energy(build_lindbladian(with_signs(family, std::vector<int>{1}), -0.4), cfg);
    const double minus = achieved_energy(build_lindbladian(with_signs(family, std::vector<int>{-1}), -0.4), cfg);
    CHECK(std::abs(plus - minus) < 1e-12);
  }
}

TEST_CASE("small-t slope matches the first order term") {
  const auto family = sample_sparse({Model::SparsePauli, 3, 2, 4, 3});
  const double y = -0.2;
  const double slope = small_t_slope(family, y, 1e-4, expm_enumerate());
  const double t1 = first_order_term(family, y, 1.0);
  CHECK(std::abs(slope - t1) <= 1e-6 * std::abs(t1));
}

TEST_CASE("second order residual scan") {
  const auto family = sample_sparse({Model::SparsePauli, 3, 2, 4, 4});
  const std::vector<double> grid{0.01, 0.08, 0.02, 0.04};
  const double y = -0.2;
  const auto scan = second_order_residual_scan(family, y, grid, expm_enumerate());
  REQUIRE(scan.rows.size() == 4);
  CHECK(scan.rows.front().t == 0.08);
  REQUIRE(scan.halving_ratios.size() == 3);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(scan.halving_ratios[i] >= 0.8);
    CHECK(scan.halving_ratios[i] <= 1.25);
  }
  CHECK(std::abs(scan.constant) <= 100.0 * scan.reference);

  const auto zero = second_order_residual_scan(family, 0.0, grid, expm_enumerate());
  for (const auto& r : zero.rows) CHECK(std::abs(r.residual) < 1e-14);

  const std::vector<double> bad{0.2};
  CHECK_THROWS_AS(second_order_residual_scan(family, y, bad, expm_enumerate()), ValidationError);
}

TEST_CASE("schedule") {
  CHECK(default_c_y(Model::SparsePauli) == doctest::Approx(1.0 / (3.0 * std::sqrt(3.0))));
  CHECK(default_c_t(Model::SparsePauli) == doctest::Approx(1.0 / 6.0));
  CHECK(default_c_y(Model::Syk) == doctest::Approx(1.0 / 3.0));
  const auto inst = make_instance(Model::GaussianPauli, 4, 4,
                                  {pauli_term("X1 X2 X3 X4", 4, 0.25), pauli_term("Y1 Y2 Y3 Y4", 4, 0.25),
                                   pauli_term("Z1 Z2 Z3 Z4", 4, 0.25), pauli_term("X1 Y2 Z3 X4", 4, 0.25)});
  REQUIRE(inst.h_loc == doctest::Approx(0.5));
  const auto s = schedule(inst, 0.19245, 1.0 / 6.0);
  CHECK(s.y == doctest::Approx(-0.19245));
  CHECK(s.t == doctest::Approx(1.0 / 24.0));
  CHECK(s.guards_ok());
  const auto d = schedule(inst);
  CHECK(d.guards_ok());
  CHECK(d.y < 0.0);
  const auto loose = schedule(inst, 5.0, 2.0);
  CHECK_FALSE(loose.time_guard_ok);
  CHECK_FALSE(loose.coupling_guard_ok);
  CHECK_THROWS_AS(schedule(inst, -1.0, 0.1), ValidationError);
  CHECK_THROWS_AS(schedule(inst, 0.1, 0.0), ValidationError);

  BoundCheckReport r;
  check_schedule_guards(inst, loose, r);
  CHECK(r.warnings() == 2);
  CHECK(r.all_pass());
}

TEST_CASE("glo/loc ratio statistics") {
  CHECK(sparse_m_rule(8, 2) == 34);
  const std::vector<RatioCell> cells{{Model::SparsePauli, 8, 2, 34}, {Model::SparsePauli, 4, 4, 5}};
  const auto rows = glo_loc_ratio_stats(cells, 30, 9);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].mean == doctest::Approx(1.0));  // k = n: every term touches every site
  CHECK(rows[0].mean > 1.0);
  CHECK_THROWS_AS(glo_loc_ratio_stats(cells, 29, 9), ValidationError);
  // per draw, ratio = 1/h_loc exactly for sampled models
  for (std::uint64_t d = 0; d < 30; ++d) {
    const auto inst = sample_instance({Model::SparseFermion, 8, 2, 10, derive_seed(9, 0, d)});
    CHECK(inst.h_glo * inst.h_glo / inst.h_loc == 1.0 / inst.h_loc);
  }
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{8, 16, 32, 64};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.5));
  CHECK(log_log_slope(x, y) == doctest::Approx(0.5));
  CHECK_THROWS_AS(log_log_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("bound checks on a valid instance") {
  Rng rng(4);
  const auto inst = sample_sparse({Model::SparsePauli, 3, 2, 4, 5});
  const auto rep = build_lindbladian(inst, -0.2);
  const auto d = decompose_generator(rep);
  BoundCheckReport r;
  check_commutation_condition(rep, r);
  check_locality_condition(inst, build_jump_set(inst), rep.b_table, r);
  check_b_sum_lemma(rep, r);
  check_first_order(rep, d, r);
  check_channel(rep, 0.2, 5, rng, r);
  EvolutionConfig cfg;
  cfg.t_final = 0.2;
  check_duality(rep, cfg, r);
  check_hoeffding_tail(max_eigenvalue(rep.h_dense), 8.0, 0.01, r);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name);
  const auto j = to_json(r);
  CHECK(j.at("all_pass").get<bool>());
  CHECK(j.at("checks").size() == r.checks.size());
}

TEST_CASE("cross-piece bounds") {
  Rng rng(6);
  const auto inst = sample_sparse({Model::SparsePauli, 3, 2, 4, 6});
  const auto rep = build_lindbladian(inst, -0.2);
  BoundCheckReport r;
  check_piece_norm_bounds(rep, decompose_generator(rep), 20, rng, r);
  for (const auto& c : r.checks) {
    if (c.name == "lgamma_norm_bound" || c.name == "lgammagamma_ordered_norm_bound" ||
        c.name == "lgammagamma_norm_bound_2x") {
      CHECK_MESSAGE(c.pass, c.name);
    }
  }
}

TEST_CASE("corrupted b table fails the condition checks") {
  const auto inst = sample_sparse({Model::SparsePauli, 3, 2, 4, 7});
  auto rep = build_lindbladian(inst, -0.2);
  rep.b_table[0][0] ^= 1U;
  BoundCheckReport r;
  check_commutation_condition(rep, r);
  check_locality_condition(inst, build_jump_set(inst), rep.b_table, r);
  CHECK(r.failures() == 2);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("energy report") {
  const auto inst = sample_sparse({Model::SparsePauli, 3, 2, 4, 8});
  const auto rep = build_lindbladian(inst, -0.2);
  EvolutionConfig cfg;
  cfg.t_final = 0.0;
  auto r = energy_report(rep, cfg);
  CHECK(r.achieved == doctest::Approx(0.0).epsilon(1e-15));
  cfg.t_final = 0.1;
  r = energy_report(rep, cfg);
  CHECK(r.residual == doctest::Approx(r.achieved - r.t1_prediction));
  CHECK(r.ratio == doctest::Approx(r.achieved / r.lambda_max));
  const auto j = to_json(r);
  for (const char* key : {"achieved", "t1_prediction", "residual", "lambda_max", "ratio", "y", "t"}) {
    CHECK(j.contains(key));
  }
}

}  // TEST_SUITE
