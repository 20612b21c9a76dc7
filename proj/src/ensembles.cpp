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

#include "dissip/ensembles.hpp"

#include <algorithm>
#include <cmath>

#include "dissip/errors.hpp"
#include "dissip/rng.hpp"

namespace dissip {
namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

// Advances `c` to the next k-combination of 0..n-1 in lexicographic order.
bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

HamiltonianTerm make_term(TermOp op, double h, int s) {
  HamiltonianTerm t{std::move(op), h, s, {}};
  t.support = op_support(t.op);
  return t;
}

HamiltonianInstance finish(const EnsembleSpec& spec, std::vector<HamiltonianTerm> terms) {
  return make_instance(spec.model, spec.n, spec.k, std::move(terms), spec.seed);
}

void check_gaussian_budget(const EnsembleSpec& spec) {
  const double count = gaussian_term_count(spec.model, spec.n, spec.k);
  if (count > static_cast<double>(kMaxGaussianTerms)) {
    throw CapacityError(std::string(model_name(spec.model)) + " with n=" + std::to_string(spec.n) +
                            ", k=" + std::to_string(spec.k) + " has " + std::to_string(count) + " terms",
                        "kMaxGaussianTerms", kMaxGaussianTerms);
  }
}

}  // namespace

std::string_view model_name(Model model) {
  switch (model) {
    case Model::GaussianPauli: return "gaussian_pauli";
    case Model::Syk: return "syk";
    case Model::SparsePauli: return "sparse_pauli";
    case Model::SparseFermion: return "sparse_fermion";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  for (Model m : {Model::GaussianPauli, Model::Syk, Model::SparsePauli, Model::SparseFermion}) {
    if (model_name(m) == name) return m;
  }
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected gaussian_pauli, syk, sparse_pauli or sparse_fermion)");
}

bool is_fermionic(Model model) { return model == Model::Syk || model == Model::SparseFermion; }
bool is_sampled(Model model) { return model == Model::SparsePauli || model == Model::SparseFermion; }

LocalityConstants locality_constants(Model model) {
  return is_fermionic(model) ? LocalityConstants{1, 1} : LocalityConstants{3, 2};
}

void EnsembleSpec::validate() const {
  const std::string tag(model_name(model));
  if (n < 1) throw ValidationError(tag + ": n must be positive");
  if (k < 1 || k > n) {
    throw ValidationError(tag + ": k=" + std::to_string(k) + " outside [1, n=" + std::to_string(n) + "]");
  }
  if (is_fermionic(model)) {
    if (n % 2 != 0) throw ValidationError(tag + ": Majorana mode count n must be even");
    if (k % 2 != 0) throw ValidationError(tag + ": k must be even for fermionic models");
  }
  if (is_sampled(model) && m < 1) throw ValidationError(tag + ": m must be at least 1");
}

PauliProduct canonical_pauli(const TermOp& op) {
  if (const auto* p = std::get_if<PauliString>(&op)) return {*p, Phase{}};
  const auto& mono = std::get<MajoranaMonomial>(op);
  if (!mono.even_weight()) throw ValidationError("Hamiltonian Majorana terms must have even weight");
  auto jw = jordan_wigner(mono);
  jw.phase = jw.phase * Phase{static_cast<std::uint8_t>((mono.weight() / 2) & 3)};
  return jw;
}

int op_weight(const TermOp& op) {
  return std::visit([](const auto& o) { return o.weight(); }, op);
}

std::vector<int> op_support(const TermOp& op) {
  return std::visit([](const auto& o) { return o.support(); }, op);
}

std::string op_encoding(const TermOp& op) {
  return std::visit([](const auto& o) { return o.encoding(); }, op);
}

DenseOperator HamiltonianTerm::unit_dense() const {
  const auto c = canonical_pauli(op);
  return to_dense(c.result, c.phase.value());
}

HamiltonianInstance make_instance(Model model, int n, int k, std::vector<HamiltonianTerm> terms,
                                  std::uint64_t seed) {
  HamiltonianInstance inst;
  inst.model = model;
  inst.n = n;
  inst.k = k;
  inst.m = static_cast<int>(terms.size());
  inst.seed = seed;
  inst.terms = std::move(terms);
  for (auto& t : inst.terms) {
    const int width = std::visit(
        [](const auto& o) {
          if constexpr (std::is_same_v<std::decay_t<decltype(o)>, PauliString>) return o.num_qubits();
          else return o.num_modes();
        },
        t.op);
    if (width != n) throw DimensionError("term acts on " + std::to_string(width) + " sites, instance has " +
                                         std::to_string(n));
    if (is_fermionic(model) != std::holds_alternative<MajoranaMonomial>(t.op)) {
      throw ValidationError(std::string(model_name(model)) + ": term operator type does not match the model");
    }
    if (t.s != 1 && t.s != -1) throw ValidationError("term sign must be +1 or -1");
    if (!(t.h >= 0.0) || !std::isfinite(t.h)) throw ValidationError("term strength must be finite and >= 0");
    t.support = op_support(t.op);
  }
  const auto e = local_global_energies(inst);
  inst.h_loc = e.h_loc;
  inst.h_glo = e.h_glo;
  return inst;
}

double gaussian_term_count(Model model, int n, int k) {
  return is_fermionic(model) ? binomial(n, k) : std::pow(3.0, k) * binomial(n, k);
}

HamiltonianInstance sample_gaussian_pauli(const EnsembleSpec& spec) {
  if (spec.model != Model::GaussianPauli) throw ValidationError("sample_gaussian_pauli: model must be gaussian_pauli");
  spec.validate();
  check_gaussian_budget(spec);
  const double sigma = 1.0 / std::sqrt(gaussian_term_count(spec.model, spec.n, spec.k));
  Rng rng(spec.seed);
  std::vector<HamiltonianTerm> terms;
  terms.reserve(static_cast<std::size_t>(gaussian_term_count(spec.model, spec.n, spec.k)));
  static constexpr char kLetters[3] = {'X', 'Y', 'Z'};
  std::vector<int> subset(static_cast<std::size_t>(spec.k));
  for (int i = 0; i < spec.k; ++i) subset[i] = i;
  do {
    std::vector<int> digits(static_cast<std::size_t>(spec.k), 0);
    while (true) {
      PauliString p(spec.n);
      for (int i = 0; i < spec.k; ++i) p.set(subset[i], kLetters[digits[i]]);
      const double g = sigma * rng.normal();
      terms.push_back(make_term(std::move(p), std::abs(g), g < 0.0 ? -1 : 1));
      int pos = spec.k - 1;
      while (pos >= 0 && digits[pos] == 2) digits[pos--] = 0;
      if (pos < 0) break;
      ++digits[pos];
    }
  } while (next_combination(subset, spec.n));
  return finish(spec, std::move(terms));
}

HamiltonianInstance sample_syk(const EnsembleSpec& spec) {
  if (spec.model != Model::Syk) throw ValidationError("sample_syk: model must be syk");
  spec.validate();
  check_gaussian_budget(spec);
  const double sigma = 1.0 / std::sqrt(gaussian_term_count(spec.model, spec.n, spec.k));
  Rng rng(spec.seed);
  std::vector<HamiltonianTerm> terms;
  std::vector<int> subset(static_cast<std::size_t>(spec.k));
  for (int i = 0; i < spec.k; ++i) subset[i] = i;
  do {
    const double g = sigma * rng.normal();
    terms.push_back(make_term(MajoranaMonomial::from_modes(spec.n, subset), std::abs(g), g < 0.0 ? -1 : 1));
  } while (next_combination(subset, spec.n));
  return finish(spec, std::move(terms));
}

HamiltonianInstance sample_sparse(const EnsembleSpec& spec) {
  if (!is_sampled(spec.model)) throw ValidationError("sample_sparse: model must be sparse_pauli or sparse_fermion");
  spec.validate();
  const double h = 1.0 / std::sqrt(static_cast<double>(spec.m));
  static constexpr char kLetters[3] = {'X', 'Y', 'Z'};
  Rng rng(spec.seed);
  std::vector<HamiltonianTerm> terms;
  terms.reserve(static_cast<std::size_t>(spec.m));
  for (int j = 0; j < spec.m; ++j) {
    const auto subset = rng.k_subset(spec.n, spec.k);
    TermOp op;
    if (spec.model == Model::SparsePauli) {
      PauliString p(spec.n);
      for (int site : subset) p.set(site, kLetters[rng.below(3)]);
      op = std::move(p);
    } else {
      op = MajoranaMonomial::from_modes(spec.n, subset);
    }
    const int s = rng.rademacher();
    terms.push_back(make_term(std::move(op), h, s));
  }
  return finish(spec, std::move(terms));
}

HamiltonianInstance sample_instance(const EnsembleSpec& spec) {
  switch (spec.model) {
    case Model::GaussianPauli: return sample_gaussian_pauli(spec);
    case Model::Syk: return sample_syk(spec);
    case Model::SparsePauli:
    case Model::SparseFermion: return sample_sparse(spec);
  }
  throw ValidationError("unknown model");
}

LocalGlobal local_global_energies(const HamiltonianInstance& instance) {
  // Sampled instances carry h = 1/sqrt(m) on every term; count supports so
  // that h_glo is exactly 1 instead of m rounded squares.
  if (is_sampled(instance.model) && !instance.terms.empty()) {
    const double m = static_cast<double>(instance.terms.size());
    const double h0 = 1.0 / std::sqrt(m);
    if (std::all_of(instance.terms.begin(), instance.terms.end(), [&](const HamiltonianTerm& t) { return t.h == h0; })) {
      std::vector<int> count(static_cast<std::size_t>(std::max(instance.n, 0)), 0);
      for (const auto& t : instance.terms) {
        for (int site : t.support) ++count[static_cast<std::size_t>(site)];
      }
      const int worst = count.empty() ? 0 : *std::max_element(count.begin(), count.end());
      return {std::sqrt(static_cast<double>(worst) / m), 1.0};
    }
  }
  std::vector<double> per_site(static_cast<std::size_t>(std::max(instance.n, 0)), 0.0);
  double total = 0.0;
  for (const auto& t : instance.terms) {
    const double h2 = t.h * t.h;
    total += h2;
    for (int site : t.support) per_site[static_cast<std::size_t>(site)] += h2;
  }
  const double worst = per_site.empty() ? 0.0 : *std::max_element(per_site.begin(), per_site.end());
  return {std::sqrt(worst), std::sqrt(total)};
}

DenseOperator instance_to_dense(const HamiltonianInstance& instance) {
  const int q = instance.qubits();
  check_dense_capacity(q, "instance_to_dense");
  const Eigen::Index dim = Eigen::Index{1} << q;
  DenseOperator h = DenseOperator::Zero(dim, dim);
  for (const auto& t : instance.terms) {
    const auto c = canonical_pauli(t.op);
    accumulate_pauli(h, c.result, static_cast<double>(t.s) * t.h * c.phase.value());
  }
  return h;
}

HamiltonianInstance with_signs(const HamiltonianInstance& instance, std::span<const int> signs) {
  if (signs.size() != instance.terms.size()) {
    throw DimensionError("with_signs: " + std::to_string(signs.size()) + " signs for " +
                         std::to_string(instance.terms.size()) + " terms");
  }
  HamiltonianInstance out = instance;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw ValidationError("signs must be +1 or -1");
    out.terms[i].s = signs[i];
  }
  return out;
}

nlohmann::json instance_to_json(const HamiltonianInstance& instance) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : instance.terms) {
    terms.push_back({{"op", op_encoding(t.op)}, {"h", t.h}, {"s", t.s}});
  }
  return nlohmann::json{{"model", model_name(instance.model)},
                        {"n", instance.n},
                        {"k", instance.k},
                        {"m", instance.m},
                        {"seed", instance.seed},
                        {"terms", std::move(terms)}};
}

HamiltonianInstance instance_from_json(const nlohmann::json& doc) {
  try {
    const Model model = parse_model(doc.at("model").get<std::string>());
    const int n = doc.at("n").get<int>();
    const int k = doc.at("k").get<int>();
    const int m = doc.at("m").get<int>();
    const auto seed = doc.at("seed").get<std::uint64_t>();
    std::vector<HamiltonianTerm> terms;
    for (const auto& t : doc.at("terms")) {
      const auto enc = t.at("op").get<std::string>();
      TermOp op = is_fermionic(model) ? TermOp(MajoranaMonomial::parse(enc, n)) : TermOp(PauliString::parse(enc, n));
      if (op_weight(op) != k) {
        throw ValidationError("term '" + enc + "' has weight " + std::to_string(op_weight(op)) + ", expected k=" +
                              std::to_string(k));
      }
      terms.push_back(make_term(std::move(op), t.at("h").get<double>(), t.at("s").get<int>()));
    }
    auto inst = make_instance(model, n, k, std::move(terms), seed);
    if (inst.m != m) {
      throw ValidationError("instance declares m=" + std::to_string(m) + " but lists " + std::to_string(inst.m) +
                            " terms");
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed instance JSON: ") + e.what());
  }
}

std::string serialize_instance(const HamiltonianInstance& instance) { return instance_to_json(instance).dump(2); }

}  // namespace dissip
