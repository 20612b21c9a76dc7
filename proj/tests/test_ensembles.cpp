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
#include <set>

#include "dissip/ensembles.hpp"
#include "dissip/errors.hpp"
#include "dissip/rng.hpp"
#include "oracles.hpp"

using namespace dissip;

namespace {

HamiltonianTerm pauli_term(const char* enc, int n, double h, int s = 1) {
  return HamiltonianTerm{PauliString::parse(enc, n), h, s, {}};
}

}  // namespace

TEST_SUITE("ensembles") {

TEST_CASE("model names round trip") {
  for (Model m : {Model::GaussianPauli, Model::Syk, Model::SparsePauli, Model::SparseFermion}) {
    CHECK(parse_model(model_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_model("ising"), ValidationError);
  CHECK(locality_constants(Model::SparsePauli).a_loc == 3);
  CHECK(locality_constants(Model::SparsePauli).a_ac == 2);
  CHECK(locality_constants(Model::Syk).a_loc == 1);
  CHECK(locality_constants(Model::Syk).a_ac == 1);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS((EnsembleSpec{Model::SparsePauli, 4, 5, 3, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((EnsembleSpec{Model::SparsePauli, 4, 2, 0, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((EnsembleSpec{Model::Syk, 5, 2, 0, 0}.validate()), ValidationError);
  CHECK_THROWS_AS((EnsembleSpec{Model::SparseFermion, 6, 3, 4, 0}.validate()), ValidationError);
  CHECK_NOTHROW((EnsembleSpec{Model::GaussianPauli, 2, 1, 0, 0}.validate()));
  CHECK((EnsembleSpec{Model::SparsePauli, 4, 2, 3, 0}.in_theorem_regime()));
  CHECK_FALSE((EnsembleSpec{Model::Syk, 4, 4, 0, 0}.in_theorem_regime()));
}

TEST_CASE("Gaussian Pauli term counts") {
  auto inst = sample_gaussian_pauli({Model::GaussianPauli, 2, 1, 0, 1});
  CHECK(inst.terms.size() == 6);
  CHECK(gaussian_term_count(Model::GaussianPauli, 2, 1) == 6);
  inst = sample_gaussian_pauli({Model::GaussianPauli, 3, 2, 0, 1});
  CHECK(inst.terms.size() == 27);
  std::set<std::string> encodings;
  for (const auto& t : inst.terms) {
    encodings.insert(op_encoding(t.op));
    CHECK(t.support.size() == 2);
  }
  CHECK(encodings.size() == 27);
}

TEST_CASE("SYK term counts") {
  auto inst = sample_syk({Model::Syk, 6, 4, 0, 3});
  CHECK(inst.terms.size() == 15);
  CHECK(inst.qubits() == 3);
  inst = sample_syk({Model::Syk, 4, 4, 0, 3});
  CHECK(inst.terms.size() == 1);
  CHECK(inst.h_glo == doctest::Approx(inst.terms[0].h));
}

TEST_CASE("Gaussian variance normalization") {
  // E sum h^2 = 1; average h_glo^2 over draws
  for (Model m : {Model::GaussianPauli, Model::Syk}) {
    const int n = m == Model::Syk ? 8 : 4;
    double acc = 0.0, acc2 = 0.0;
    const int draws = 400;
    for (int d = 0; d < draws; ++d) {
      const auto inst = sample_instance({m, n, 2, 0, derive_seed(77, 0, static_cast<std::uint64_t>(d))});
      const double g2 = inst.h_glo * inst.h_glo;
      acc += g2;
      acc2 += g2 * g2;
    }
    const double mean = acc / draws;
    const double se = std::sqrt((acc2 / draws - mean * mean) / draws);
    CHECK(std::abs(mean - 1.0) < 4.0 * se);
  }
}

TEST_CASE("sparse sampling") {
  const auto inst = sample_sparse({Model::SparsePauli, 4, 2, 5, 7});
  REQUIRE(inst.terms.size() == 5);
  for (const auto& t : inst.terms) {
    CHECK(t.h == 1.0 / std::sqrt(5.0));
    CHECK(t.support.size() == 2);
  }
  CHECK(inst.h_glo == 1.0);
  const auto one = sample_sparse({Model::SparsePauli, 3, 2, 1, 2});
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(instance_to_dense(one));
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.0));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (Model m : {Model::SparsePauli, Model::SparseFermion}) {
      const auto s = sample_instance({m, 8, 2, 7, seed});
      CHECK(s.h_glo == 1.0);
      CHECK(s.h_loc <= s.h_glo);
    }
  }
}

TEST_CASE("same seed reproduces the instance") {
  for (Model m : {Model::GaussianPauli, Model::Syk, Model::SparsePauli, Model::SparseFermion}) {
    const EnsembleSpec spec{m, 6, 2, 9, 1234};
    CHECK(serialize_instance(sample_instance(spec)) == serialize_instance(sample_instance(spec)));
    EnsembleSpec other = spec;
    other.seed = 1235;
    CHECK(serialize_instance(sample_instance(spec)) != serialize_instance(sample_instance(other)));
  }
}

TEST_CASE("every term has weight k and squares to +I") {
  Rng rng(1);
  for (Model m : {Model::GaussianPauli, Model::Syk, Model::SparsePauli, Model::SparseFermion}) {
    const int n = is_fermionic(m) ? 8 : 4;
    const auto inst = sample_instance({m, n, 2, 6, rng.next()});
    const int q = inst.qubits();
    for (const auto& t : inst.terms) {
      CHECK(op_weight(t.op) == 2);
      const auto d = t.unit_dense();
      CHECK(is_hermitian(d));
      CHECK(oracle::max_abs(d * d - DenseOperator::Identity(1 << q, 1 << q)) < 1e-12);
    }
    CHECK(is_hermitian(instance_to_dense(inst), 1e-12));
  }
}

TEST_CASE("local and global energies") {
  auto inst = make_instance(Model::SparsePauli, 2, 2, {pauli_term("X1 X2", 2, 1.0)});
  CHECK(inst.h_loc == doctest::Approx(1.0));
  CHECK(inst.h_glo == doctest::Approx(1.0));
  const double r = 1.0 / std::sqrt(2.0);
  inst = make_instance(Model::GaussianPauli, 4, 2, {pauli_term("X1 X2", 4, r), pauli_term("Z3 Z4", 4, r)});
  CHECK(inst.h_glo == doctest::Approx(1.0));
  CHECK(inst.h_loc == doctest::Approx(r));
  inst = make_instance(Model::GaussianPauli, 4, 2, {pauli_term("X1 X2", 4, r), pauli_term("Z1 Z2", 4, r)});
  CHECK(inst.h_loc == doctest::Approx(1.0));
}

TEST_CASE("dense Hamiltonian") {
  auto empty = make_instance(Model::SparsePauli, 2, 2, {});
  CHECK(oracle::max_abs(instance_to_dense(empty)) == 0.0);
  auto z = make_instance(Model::GaussianPauli, 1, 1, {pauli_term("Z1", 1, 1.0)});
  CHECK(oracle::max_abs(instance_to_dense(z) - oracle::pauli2('Z')) == 0.0);

  // term-by-term oracle
  const auto inst = sample_sparse({Model::SparsePauli, 2, 2, 2, 5});
  oracle::Mat expect = oracle::Mat::Zero(4, 4);
  for (const auto& t : inst.terms) {
    const auto& p = std::get<PauliString>(t.op);
    std::string letters;
    for (int i = 0; i < 2; ++i) letters += p.letter(i);
    expect += t.s * t.h * oracle::pauli_string(letters);
  }
  CHECK(oracle::max_abs(instance_to_dense(inst) - expect) < 1e-15);

  // fermionic canonical phase: i chi_1 chi_2 = -Z
  auto f = make_instance(Model::Syk, 2, 2, {HamiltonianTerm{MajoranaMonomial::parse("M1 M2", 2), 1.0, 1, {}}});
  CHECK(oracle::max_abs(instance_to_dense(f) + oracle::pauli2('Z')) < 1e-15);
}

TEST_CASE("normalization E H^2 = I by Monte Carlo") {
  double acc = 0.0, acc2 = 0.0;
  const int draws = 200;
  for (int d = 0; d < draws; ++d) {
    const auto inst = sample_instance({Model::GaussianPauli, 8, 2, 0, derive_seed(5, 1, static_cast<std::uint64_t>(d))});
    // Tr[H^2]/2^q = sum h^2 for orthonormal Pauli terms; check densely on a subset
    double v = inst.h_glo * inst.h_glo;
    if (d < 3) {
      const auto h = instance_to_dense(inst);
      const double dense_v = (h * h).trace().real() / static_cast<double>(h.rows());
      CHECK(dense_v == doctest::Approx(v).epsilon(1e-10));
    }
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / draws;
  const double se = std::sqrt((acc2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("with_signs") {
  const auto inst = sample_sparse({Model::SparsePauli, 3, 2, 3, 4});
  const std::vector<int> s{1, -1, 1};
  const auto flipped = with_signs(inst, s);
  for (std::size_t i = 0; i < 3; ++i) CHECK(flipped.terms[i].s == s[i]);
  CHECK(flipped.h_glo == inst.h_glo);
  const std::vector<int> bad{1, 2, 1};
  CHECK_THROWS(with_signs(inst, bad));
  CHECK_THROWS_AS(with_signs(inst, std::vector<int>{1}), DimensionError);
}

TEST_CASE("instance JSON round trip is byte identical") {
  for (Model m : {Model::GaussianPauli, Model::Syk, Model::SparsePauli, Model::SparseFermion}) {
    const auto inst = sample_instance({m, 6, 2, 5, 99});
    const auto text = serialize_instance(inst);
    const auto back = instance_from_json(nlohmann::json::parse(text));
    CHECK(serialize_instance(back) == text);
    CHECK(back.h_loc == inst.h_loc);
    CHECK(back.h_glo == inst.h_glo);
  }
  auto doc = instance_to_json(sample_sparse({Model::SparsePauli, 4, 2, 2, 1}));
  doc["terms"][0]["op"] = "X1 X2 X3";
  CHECK_THROWS_AS(instance_from_json(doc), ValidationError);
  doc = instance_to_json(sample_sparse({Model::SparsePauli, 4, 2, 2, 1}));
  doc["m"] = 3;
  CHECK_THROWS_AS(instance_from_json(doc), ValidationError);
  CHECK_THROWS_AS(instance_from_json(nlohmann::json::object()), ValidationError);
}

}  // TEST_SUITE
