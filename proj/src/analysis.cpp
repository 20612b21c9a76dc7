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

#include "dissip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dissip/errors.hpp"

namespace dissip {
namespace {

struct MeanStd {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

MeanStd mean_and_stderr(std::span<const double> v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.stderr_of_mean = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

std::vector<int> signs_from_pattern(std::uint64_t pattern, std::size_t m) {
  std::vector<int> s(m);
  for (std::size_t g = 0; g < m; ++g) s[g] = ((pattern >> g) & 1U) != 0U ? -1 : 1;
  return s;
}

}  // namespace

double energy(const DenseOperator& rho, const DenseOperator& h) {
  if (rho.rows() != h.rows() || rho.cols() != h.cols() || rho.rows() != rho.cols()) {
    throw DimensionError("energy: rho is " + std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()) +
                         ", H is " + std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
  const Complex tr = (rho.array() * h.transpose().array()).sum();
  if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag())) throw NumericalError("energy: non-finite trace");
  if (std::abs(tr.imag()) > 1e-10) {
    throw NumericalError("energy: imaginary part " + std::to_string(tr.imag()) + " exceeds 1e-10");
  }
  return tr.real();
}

Complex normalized_trace(const DenseOperator& op) { return op.trace() / static_cast<double>(op.rows()); }

double first_order_term(const HamiltonianInstance& instance, double y, double t) {
  const auto c = locality_constants(instance.model);
  return -8.0 * y * t * instance.h_glo * instance.h_glo * c.a_ac * instance.k;
}

double max_eigenvalue(const DenseOperator& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw DimensionError("max_eigenvalue: operator must be square");
  const auto q = static_cast<int>(std::log2(static_cast<double>(h.rows())) + 0.5);
  check_dense_capacity(q, "max_eigenvalue");
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double achieved_energy(const LindbladianRep& rep, const EvolutionConfig& cfg) {
  const int q = rep.instance.qubits();
  const auto mu = maximally_mixed(q);
  if (cfg.t_final == 0.0) return energy(mu.rho, rep.h_dense);
  return energy(evolve(rep, mu, cfg).rho, rep.h_dense);
}

nlohmann::json to_json(const EnergyReport& r) {
  return {{"achieved", r.achieved}, {"t1_prediction", r.t1_prediction}, {"residual", r.residual},
          {"lambda_max", r.lambda_max}, {"ratio", r.ratio}, {"y", r.y}, {"t", r.t}};
}

EnergyReport energy_report(const LindbladianRep& rep, const EvolutionConfig& cfg) {
  EnergyReport r;
  r.y = rep.y;
  r.t = cfg.t_final;
  r.achieved = achieved_energy(rep, cfg);
  r.t1_prediction = first_order_term(rep.instance, rep.y, cfg.t_final);
  r.residual = r.achieved - r.t1_prediction;
  r.lambda_max = max_eigenvalue(rep.h_dense);
  r.ratio = r.lambda_max != 0.0 ? r.achieved / r.lambda_max : 0.0;
  return r;
}

std::vector<FirstOrderEntry> first_order_entries(const LindbladianRep& rep, const GeneratorDecomposition& decomp) {
  std::vector<FirstOrderEntry> out;
  for (int a = 0; a < decomp.num_jumps(); ++a) {
    for (int g = 0; g < decomp.num_terms(); ++g) {
      const double h = rep.instance.terms[static_cast<std::size_t>(g)].h;
      const double b = rep.b_table[static_cast<std::size_t>(a)][static_cast<std::size_t>(g)];
      const double dense = normalized_trace(decomp.lgamma_jump(a, g, decomp.term(g))).real();
      out.push_back({a, g, dense, -8.0 * b * h * h * rep.y});
    }
  }
  return out;
}

AverageEnergy rademacher_average_energy(const HamiltonianInstance& family, double y, double t,
                                        const RademacherConfig& cfg) {
  const std::size_t m = family.terms.size();
  EvolutionConfig evo = cfg.evolution;
  evo.t_final = t;
  std::vector<double> values;
  auto eval = [&](std::span<const int> signs) {
    const auto rep = build_lindbladian(with_signs(family, signs), y);
    values.push_back(achieved_energy(rep, evo));
  };
  if (cfg.mode == SignMode::Enumerate) {
    if (m > cfg.max_enumerate_terms || m >= 63) {
      throw CapacityError("sign enumeration over " + std::to_string(m) + " terms", "max enumerate terms",
                          cfg.max_enumerate_terms);
    }
    const std::uint64_t count = std::uint64_t{1} << m;
    values.reserve(count);
    for (std::uint64_t p = 0; p < count; ++p) eval(signs_from_pattern(p, m));
  } else {
    if (cfg.samples < 1) throw ValidationError("sample mode needs at least one sample");
    Rng rng(cfg.seed);
    std::vector<int> signs(m);
    for (int i = 0; i < cfg.samples; ++i) {
      for (auto& s : signs) s = rng.rademacher();
      eval(signs);
    }
  }
  const auto ms = mean_and_stderr(values);
  return {ms.mean, ms.stderr_of_mean, values.size()};
}

double small_t_slope(const HamiltonianInstance& family, double y, double t0, const RademacherConfig& cfg) {
  if (!(t0 > 0.0)) throw ValidationError("small_t_slope: t0 must be positive");
  const double f1 = rademacher_average_energy(family, y, t0, cfg).mean;
  const double f2 = rademacher_average_energy(family, y, 0.5 * t0, cfg).mean;
  return 2.0 * f2 / (0.5 * t0) - f1 / t0;
}

ResidualScan second_order_residual_scan(const HamiltonianInstance& family, double y, std::span<const double> t_grid,
                                        const RademacherConfig& cfg) {
  const auto c = locality_constants(family.model);
  std::vector<double> ts(t_grid.begin(), t_grid.end());
  for (double t : ts) {
    if (!(t > 0.0) || c.a_loc * family.k * t >= 1.0) {
      throw ValidationError("residual scan: t=" + std::to_string(t) + " outside 0 < t < 1/(a_loc k)");
    }
  }
  std::sort(ts.begin(), ts.end(), std::greater<>());
  ResidualScan scan;
  for (double t : ts) {
    ResidualRow row;
    row.t = t;
    row.mean_energy = rademacher_average_energy(family, y, t, cfg).mean;
    row.t1 = first_order_term(family, y, t);
    row.residual = row.mean_energy - row.t1;
    row.residual_over_t2 = row.residual / (t * t);
    scan.rows.push_back(row);
  }
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    const double prev = scan.rows[i - 1].residual_over_t2;
    scan.halving_ratios.push_back(prev != 0.0 ? scan.rows[i].residual_over_t2 / prev
                                              : std::numeric_limits<double>::quiet_NaN());
  }
  if (!scan.rows.empty()) scan.constant = scan.rows.back().residual_over_t2;
  scan.reference = std::abs(y) * c.a_loc * c.a_loc * family.k * family.k * family.h_glo * family.h_glo;
  return scan;
}

double default_c_y(Model model) { return 1.0 / (3.0 * std::sqrt(static_cast<double>(locality_constants(model).a_loc))); }
double default_c_t(Model model) { return 1.0 / (2.0 * locality_constants(model).a_loc); }

Schedule schedule(const HamiltonianInstance& instance, std::optional<double> c_y, std::optional<double> c_t) {
  Schedule s;
  s.c_y = c_y.value_or(default_c_y(instance.model));
  s.c_t = c_t.value_or(default_c_t(instance.model));
  if (!(s.c_y > 0.0) || !(s.c_t > 0.0)) throw ValidationError("schedule constants c_y and c_t must be positive");
  if (!(instance.h_loc > 0.0)) throw ValidationError("schedule: instance has zero local energy");
  if (instance.k < 1) throw ValidationError("schedule: k must be positive");
  const auto c = locality_constants(instance.model);
  const double k = instance.k;
  s.y = -s.c_y / (std::sqrt(k) * instance.h_loc);
  s.t = s.c_t / k;
  s.time_guard_ok = c.a_loc * k * s.t < 1.0;
  s.coupling_guard_ok = s.y * s.y * instance.h_loc * instance.h_loc * c.a_loc * k < 0.125;
  return s;
}

int sparse_m_rule(int n, int k) {
  if (n < 1 || k < 1) throw ValidationError("sparse_m_rule: n and k must be positive");
  return std::max(1, static_cast<int>(std::ceil(4.0 * n * std::log(static_cast<double>(n)) / k)));
}

std::vector<RatioRow> glo_loc_ratio_stats(std::span<const RatioCell> cells, int draws, std::uint64_t master_seed) {
  if (draws < 30) throw ValidationError("glo_loc_ratio_stats needs at least 30 draws per cell");
  std::vector<RatioRow> rows;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(draws));
    for (int d = 0; d < draws; ++d) {
      EnsembleSpec spec{cell.model, cell.n, cell.k, cell.m, derive_seed(master_seed, ci, static_cast<std::uint64_t>(d))};
      const auto inst = sample_instance(spec);
      ratios.push_back(inst.h_glo * inst.h_glo / inst.h_loc);
    }
    const auto ms = mean_and_stderr(ratios);
    rows.push_back({cell, draws, ms.mean, ms.stderr_of_mean});
  }
  return rows;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("log_log_slope needs two or more paired points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ValidationError("log_log_slope needs positive values");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DenseOperator random_hermitian(Eigen::Index dim, Rng& rng) {
  DenseOperator g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = Complex(rng.normal(), rng.normal());
  }
  return 0.5 * (g + g.adjoint());
}

void BoundCheckReport::add(std::string name, double lhs, double rhs, double tolerance, Severity severity,
                           std::string detail) {
  const bool pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + tolerance;
  checks.push_back({std::move(name), lhs, rhs, tolerance, pass, severity, std::move(detail)});
}

void BoundCheckReport::append(const BoundCheckReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

bool BoundCheckReport::all_pass() const { return failures() == 0; }

std::size_t BoundCheckReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const BoundCheck& c) {
    return !c.pass && c.severity == Severity::Error;
  }));
}

std::size_t BoundCheckReport::warnings() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const BoundCheck& c) {
    return !c.pass && c.severity == Severity::Warning;
  }));
}

nlohmann::json to_json(const BoundCheckReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"severity", c.severity == Severity::Error ? "error" : "warning"},
                      {"detail", c.detail}});
  }
  return {{"all_pass", report.all_pass()},
          {"failures", report.failures()},
          {"warnings", report.warnings()},
          {"checks", std::move(checks)}};
}

void check_commutation_condition(const LindbladianRep& rep, BoundCheckReport& report) {
  double worst = 0.0;
  std::vector<DenseOperator> units;
  for (const auto& t : rep.instance.terms) units.push_back(t.unit_dense());
  for (std::size_t a = 0; a < rep.jumps.size(); ++a) {
    const auto& A = rep.jumps[a].a_dense;
    for (std::size_t g = 0; g < units.size(); ++g) {
      const DenseOperator lhs = A * units[g] - units[g] * A;
      const DenseOperator rhs = 2.0 * rep.b_table[a][g] * (A * units[g]);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  report.add("commutation_condition", worst, 0.0, 1e-12, Severity::Error,
             "max |[A,H_g] - 2 b A H_g| over jumps and terms");
}

void check_locality_condition(const HamiltonianInstance& instance, std::span<const TermOp> jumps, const BTable& b_table,
                              BoundCheckReport& report) {
  const auto c = locality_constants(instance.model);
  std::size_t violations = 0;
  for (std::size_t g = 0; g < instance.terms.size(); ++g) {
    int sum = 0;
    for (std::size_t a = 0; a < jumps.size(); ++a) sum += b_table.at(a).at(g);
    if (sum != c.a_ac * static_cast<int>(instance.terms[g].support.size())) ++violations;
    if (static_cast<int>(instance.terms[g].support.size()) != instance.k) ++violations;
  }
  report.add("anticommuting_jumps_per_term", static_cast<double>(violations), 0.0, 0.0, Severity::Error,
             "terms with sum_a b_ag != a_ac k");
  std::vector<int> per_site(static_cast<std::size_t>(instance.n), 0);
  for (const auto& j : jumps) {
    const auto s = op_support(j);
    for (int site : s) ++per_site[static_cast<std::size_t>(site)];
  }
  std::size_t site_violations = 0;
  for (int count : per_site) site_violations += count != c.a_loc ? 1 : 0;
  const bool total_ok = static_cast<int>(jumps.size()) == c.a_loc * instance.n;
  report.add("jumps_per_site", static_cast<double>(site_violations + (total_ok ? 0 : 1)), 0.0, 0.0, Severity::Error,
             "sites Z with |A_Z| != a_loc |Z|");
}

void check_piece_norm_bounds(const LindbladianRep& rep, const GeneratorDecomposition& decomp, int test_ops, Rng& rng,
                             BoundCheckReport& report) {
  const int m = decomp.num_terms();
  const auto dim = rep.dim();
  std::vector<DenseOperator> ops;
  std::vector<double> norms;
  for (int i = 0; i < test_ops; ++i) {
    ops.push_back(random_hermitian(dim, rng));
    norms.push_back(spectral_norm(ops.back()));
  }
  auto sampled = [&](const auto& apply) {
    double best = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) best = std::max(best, spectral_norm(apply(ops[i])) / norms[i]);
    return best;
  };
  const double ay = std::abs(rep.y);
  double worst_gap = -std::numeric_limits<double>::infinity();
  double worst_lhs = 0.0, worst_rhs = 0.0;
  for (int g = 0; g < m; ++g) {
    double bsum = 0.0;
    for (std::size_t a = 0; a < rep.jumps.size(); ++a) bsum += rep.b_table[a][static_cast<std::size_t>(g)];
    const double bound = 8.0 * ay * bsum * rep.instance.terms[static_cast<std::size_t>(g)].h;
    const double est = sampled([&](const DenseOperator& o) { return decomp.lgamma(g, o); });
    if (est - bound > worst_gap) {
      worst_gap = est - bound;
      worst_lhs = est;
      worst_rhs = bound;
    }
  }
  if (m > 0) report.add("lgamma_norm_bound", worst_lhs, worst_rhs, 1e-9, Severity::Error, "worst term");
  // The symmetrized cross piece is checked against the stated constant and
  // against twice it; each single ordering against the stated constant.
  struct Worst {
    double gap = -std::numeric_limits<double>::infinity();
    double lhs = 0.0;
    double rhs = 0.0;
    void offer(double est, double bound) {
      if (est - bound > gap) {
        gap = est - bound;
        lhs = est;
        rhs = bound;
      }
    }
  } sym, sym2, ordered;
  bool any_pair = false;
  for (int g = 0; g < m; ++g) {
    for (int g2 = g + 1; g2 < m; ++g2) {
      double bb = 0.0;
      for (std::size_t a = 0; a < rep.jumps.size(); ++a) {
        bb += rep.b_table[a][static_cast<std::size_t>(g)] * rep.b_table[a][static_cast<std::size_t>(g2)];
      }
      const double bound = 8.0 * ay * ay * bb * rep.instance.terms[static_cast<std::size_t>(g)].h *
                           rep.instance.terms[static_cast<std::size_t>(g2)].h;
      const double est = sampled([&](const DenseOperator& o) { return decomp.lgammagamma(g, g2, o); });
      sym.offer(est, bound);
      sym2.offer(est, 2.0 * bound);
      for (const auto& [u, v] : {std::pair{g, g2}, std::pair{g2, g}}) {
        ordered.offer(sampled([&](const DenseOperator& o) {
                        DenseOperator acc = DenseOperator::Zero(o.rows(), o.cols());
                        for (int a = 0; a < decomp.num_jumps(); ++a) acc += decomp.lgammagamma_jump(a, u, v, o);
                        return acc;
                      }),
                      bound);
      }
      any_pair = true;
    }
  }
  if (any_pair) {
    report.add("lgammagamma_norm_bound", sym.lhs, sym.rhs, 1e-9, Severity::Error,
               "symmetrized cross piece vs 8 y^2 sum_a b b' h h', worst pair");
    report.add("lgammagamma_norm_bound_2x", sym2.lhs, sym2.rhs, 1e-9, Severity::Error,
               "symmetrized cross piece vs 16 y^2 sum_a b b' h h', worst pair");
    report.add("lgammagamma_ordered_norm_bound", ordered.lhs, ordered.rhs, 1e-9, Severity::Error,
               "single-ordering cross piece vs 8 y^2 sum_a b b' h h', worst pair");
  }
}

void check_b_sum_lemma(const LindbladianRep& rep, BoundCheckReport& report) {
  const auto c = locality_constants(rep.instance.model);
  const auto& terms = rep.instance.terms;
  const double rhs = c.a_loc * rep.instance.k * rep.instance.h_loc * rep.instance.h_loc;
  double worst = 0.0;
  for (std::size_t gp = 0; gp < terms.size(); ++gp) {
    double sum = 0.0;
    for (std::size_t a = 0; a < rep.jumps.size(); ++a) {
      if (rep.b_table[a][gp] == 0U) continue;
      for (std::size_t g = 0; g < terms.size(); ++g) sum += rep.b_table[a][g] * terms[g].h * terms[g].h;
    }
    worst = std::max(worst, sum);
  }
  report.add("b_sum_lemma", worst, rhs, 1e-12, Severity::Error, "max over g' of sum_a sum_g b_ag' b_ag h_g^2");
}

void check_first_order(const LindbladianRep& rep, const GeneratorDecomposition& decomp, BoundCheckReport& report) {
  const auto entries = first_order_entries(rep, decomp);
  double worst = 0.0, total = 0.0;
  for (const auto& e : entries) {
    worst = std::max(worst, std::abs(e.dense - e.closed_form));
    total += e.dense;
  }
  report.add("first_order_per_entry", worst, 0.0, 1e-10, Severity::Error, "max |Tr[L^a_g(H_g)] + 8 b h^2 y|");
  report.add("first_order_sum", std::abs(total - first_order_term(rep.instance, rep.y, 1.0)), 0.0, 1e-9,
             Severity::Error, "|sum_ag Tr[L^a_g(H_g)] + 8 y h_glo^2 a_ac k|");
}

void check_hoeffding_tail(double lambda_max, double dim, double delta, BoundCheckReport& report) {
  report.add("hoeffding_tail", lambda_max, std::sqrt(8.0 * std::log(2.0 * dim / delta)), 0.0, Severity::Error,
             "lambda_max <= sqrt(8 ln(2N/delta))");
}

void check_channel(const LindbladianRep& rep, double t, int test_ops, Rng& rng, BoundCheckReport& report) {
  const auto n = rep.dim();
  const DenseOperator choi = choi_matrix(rep, t);
  report.add("choi_psd", -min_eigenvalue(choi), 0.0, 1e-8, Severity::Error, "negated min eigenvalue of the Choi matrix");
  const DenseOperator tp = choi_output_trace(choi, n) - DenseOperator::Identity(n, n);
  report.add("trace_preservation", tp.cwiseAbs().maxCoeff(), 0.0, 1e-9, Severity::Error, "max |Tr_out Choi - I|");
  const DenseOperator heis = exp_generator(rep, t, Picture::Heisenberg);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < test_ops; ++i) {
    const DenseOperator o = random_hermitian(n, rng);
    worst = std::max(worst, spectral_norm(apply_superoperator(heis, o)) - spectral_norm(o));
  }
  if (test_ops > 0) {
    report.add("norm_contraction", worst, 0.0, 1e-8, Severity::Error, "max ||e^{L^dag t}(O)|| - ||O||");
  }
}

void check_duality(const LindbladianRep& rep, const EvolutionConfig& cfg, BoundCheckReport& report) {
  const double schrodinger = achieved_energy(rep, cfg);
  const double heisenberg = normalized_trace(heisenberg_evolve(rep, rep.h_dense, cfg)).real();
  report.add("duality", std::abs(schrodinger - heisenberg), 0.0, 1e-8, Severity::Error,
             "|Tr[H e^{Lt}(mu)] - Tr-bar[e^{L^dag t}(H)]|");
}

void check_schedule_guards(const HamiltonianInstance& instance, const Schedule& s, BoundCheckReport& report) {
  const auto c = locality_constants(instance.model);
  report.add("schedule_time_guard", c.a_loc * instance.k * s.t, 1.0, 0.0, Severity::Warning, "a_loc k t < 1");
  report.add("schedule_coupling_guard", s.y * s.y * instance.h_loc * instance.h_loc * c.a_loc * instance.k, 0.125, 0.0,
             Severity::Warning, "y^2 h_loc^2 a_loc k < 1/8");
}

}  // namespace dissip
