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

#include "dissip/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "dissip/errors.hpp"
#include "dissip/lindblad.hpp"
#include "dissip/rng.hpp"

namespace dissip {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw ValidationError(where + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
void read_opt(const json& obj, const char* key, std::optional<T>& out) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = obj.at(key).get<T>();
}

std::string method_name(Method m) { return m == Method::Rk4 ? "rk4" : "expm"; }

Method parse_method(const std::string& s) {
  if (s == "rk4") return Method::Rk4;
  if (s == "expm") return Method::Expm;
  throw ValidationError("unknown evolution method '" + s + "' (expected rk4 or expm)");
}

bool finite_report(const EnergyReport& r) {
  return std::isfinite(r.achieved) && std::isfinite(r.t1_prediction) && std::isfinite(r.residual) &&
         std::isfinite(r.lambda_max) && std::isfinite(r.ratio);
}

double percentile(std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void prefix_checks(BoundCheckReport& r, const std::string& prefix) {
  for (auto& c : r.checks) c.name = prefix + c.name;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (draws < 1) throw ValidationError("draws must be >= 1");
  if (cells.empty()) throw ValidationError("experiment needs at least one cell");
  if (bootstrap_resamples < 1) throw ValidationError("bootstrap_resamples must be >= 1");
  if (threads < 0) throw ValidationError("threads must be >= 0");
  if (evolution.step_guard <= 0.0) throw ValidationError("evolution.step_guard must be positive");
  if (evolution.steps < 0) throw ValidationError("evolution.steps must be >= 0");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    c.spec.validate();
    const std::string where = "cell " + std::to_string(i);
    check_dense_capacity(c.spec.qubits(), where);
    if (!is_sampled(c.spec.model) && gaussian_term_count(c.spec.model, c.spec.n, c.spec.k) > kMaxGaussianTerms) {
      throw CapacityError(where + ": Gaussian term count too large", "max Gaussian terms", kMaxGaussianTerms);
    }
    if (c.y.has_value() && !std::isfinite(*c.y)) throw ValidationError(where + ": y must be finite");
    if (c.t.has_value() && !(*c.t >= 0.0 && std::isfinite(*c.t))) throw ValidationError(where + ": t must be >= 0");
    if (c.c_y.has_value() && !(*c.c_y > 0.0)) throw ValidationError(where + ": c_y must be positive");
    if (c.c_t.has_value() && !(*c.c_t > 0.0)) throw ValidationError(where + ": c_t must be positive");
    if (enumerate_signs && is_sampled(c.spec.model) && c.spec.m > 20) {
      throw CapacityError(where + ": sign enumeration needs m <= 20", "max enumerate terms", 20);
    }
  }
}

ExperimentConfig experiment_config_from_json(const json& doc) {
  ExperimentConfig cfg;
  try {
    reject_unknown_keys(doc,
                        {"master_seed", "draws", "cells", "evolution", "enumerate_signs", "run_bound_checks",
                         "bootstrap_resamples", "threads", "record_wall_time", "output"},
                        "config");
    read_opt(doc, "master_seed", cfg.master_seed);
    read_opt(doc, "draws", cfg.draws);
    read_opt(doc, "enumerate_signs", cfg.enumerate_signs);
    read_opt(doc, "run_bound_checks", cfg.run_bound_checks);
    read_opt(doc, "bootstrap_resamples", cfg.bootstrap_resamples);
    read_opt(doc, "threads", cfg.threads);
    read_opt(doc, "record_wall_time", cfg.record_wall_time);
    if (!doc.contains("cells") || !doc.at("cells").is_array()) throw ValidationError("config: 'cells' array is required");
    for (const auto& c : doc.at("cells")) {
      reject_unknown_keys(c, {"model", "n", "k", "m", "c_y", "c_t", "y", "t"}, "cell");
      CellConfig cell;
      cell.spec.model = parse_model(c.at("model").get<std::string>());
      cell.spec.n = c.at("n").get<int>();
      cell.spec.k = c.at("k").get<int>();
      read_opt(c, "m", cell.spec.m);
      read_opt(c, "c_y", cell.c_y);
      read_opt(c, "c_t", cell.c_t);
      read_opt(c, "y", cell.y);
      read_opt(c, "t", cell.t);
      cfg.cells.push_back(cell);
    }
    if (doc.contains("evolution")) {
      const auto& e = doc.at("evolution");
      reject_unknown_keys(e, {"method", "steps", "step_guard", "positivity_checkpoints", "positivity_abort"},
                          "evolution");
      if (e.contains("method")) cfg.evolution.method = parse_method(e.at("method").get<std::string>());
      read_opt(e, "steps", cfg.evolution.steps);
      read_opt(e, "step_guard", cfg.evolution.step_guard);
      read_opt(e, "positivity_checkpoints", cfg.evolution.positivity_checkpoints);
      read_opt(e, "positivity_abort", cfg.evolution.positivity_abort);
    }
    if (doc.contains("output")) {
      const auto& o = doc.at("output");
      reject_unknown_keys(o, {"results_csv", "stats_json", "manifest_json"}, "output");
      read_opt(o, "results_csv", cfg.results_csv);
      read_opt(o, "stats_json", cfg.stats_json);
      read_opt(o, "manifest_json", cfg.manifest_json);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json to_json(const ExperimentConfig& cfg) {
  json cells = json::array();
  for (const auto& c : cfg.cells) {
    json j = {{"model", model_name(c.spec.model)}, {"n", c.spec.n}, {"k", c.spec.k}, {"m", c.spec.m}};
    if (c.c_y) j["c_y"] = *c.c_y;
    if (c.c_t) j["c_t"] = *c.c_t;
    if (c.y) j["y"] = *c.y;
    if (c.t) j["t"] = *c.t;
    cells.push_back(std::move(j));
  }
  return {{"master_seed", cfg.master_seed},
          {"draws", cfg.draws},
          {"cells", std::move(cells)},
          {"evolution",
           {{"method", method_name(cfg.evolution.method)},
            {"steps", cfg.evolution.steps},
            {"step_guard", cfg.evolution.step_guard},
            {"positivity_checkpoints", cfg.evolution.positivity_checkpoints},
            {"positivity_abort", cfg.evolution.positivity_abort}}},
          {"enumerate_signs", cfg.enumerate_signs},
          {"run_bound_checks", cfg.run_bound_checks},
          {"bootstrap_resamples", cfg.bootstrap_resamples},
          {"threads", cfg.threads},
          {"record_wall_time", cfg.record_wall_time},
          {"output",
           {{"results_csv", cfg.results_csv}, {"stats_json", cfg.stats_json}, {"manifest_json", cfg.manifest_json}}}};
}

std::pair<double, double> resolve_schedule(const CellConfig& cell, const HamiltonianInstance& instance) {
  if (cell.y.has_value() && cell.t.has_value()) return {*cell.y, *cell.t};
  const auto s = schedule(instance, cell.c_y, cell.c_t);
  return {cell.y.value_or(s.y), cell.t.value_or(s.t)};
}

RunResult run_draw(const ExperimentConfig& cfg, int cell_id, int draw) {
  const auto& cell = cfg.cells.at(static_cast<std::size_t>(cell_id));
  RunResult r;
  r.cell_id = cell_id;
  r.draw = draw;
  r.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(cell_id), static_cast<std::uint64_t>(draw));
  r.model = cell.spec.model;
  r.n = cell.spec.n;
  r.k = cell.spec.k;
  r.m = cell.spec.m;
  const auto start = std::chrono::steady_clock::now();
  try {
    EnsembleSpec spec = cell.spec;
    spec.seed = r.seed;
    const auto inst = sample_instance(spec);
    r.m = inst.m;
    check_dense_capacity(inst.qubits(), "run_draw");
    const auto [y, t] = resolve_schedule(cell, inst);
    r.report.y = y;
    r.report.t = t;
    const auto rep = build_lindbladian(inst, y);
    EvolutionConfig evo = cfg.evolution;
    evo.t_final = t;
    if (cfg.enumerate_signs) {
      RademacherConfig rc;
      rc.mode = SignMode::Enumerate;
      rc.evolution = evo;
      r.report.achieved = rademacher_average_energy(inst, y, t, rc).mean;
      r.report.t1_prediction = first_order_term(inst, y, t);
      r.report.residual = r.report.achieved - r.report.t1_prediction;
      r.report.lambda_max = max_eigenvalue(rep.h_dense);
      r.report.ratio = r.report.lambda_max != 0.0 ? r.report.achieved / r.report.lambda_max : 0.0;
    } else {
      r.report = energy_report(rep, evo);
    }
    if (!finite_report(r.report)) throw NumericalError("non-finite energy report");
    if (cfg.run_bound_checks) {
      BoundCheckReport br;
      check_commutation_condition(rep, br);
      check_locality_condition(inst, build_jump_set(inst), rep.b_table, br);
      check_b_sum_lemma(rep, br);
      if (inst.terms.size() <= GeneratorDecomposition::kDefaultMaxTerms) {
        check_first_order(rep, decompose_generator(rep), br);
      }
      check_schedule_guards(inst, schedule(inst, cell.c_y, cell.c_t), br);
      for (const auto& c : br.checks) {
        if (c.severity != Severity::Error) continue;
        ++r.checks_total;
        if (c.pass) ++r.checks_passed;
      }
      if (!br.all_pass()) {
        r.status = kStatusCheckFailed;
        r.reason = std::to_string(br.failures()) + " bound checks failed";
      }
    }
  } catch (const RefinementError& e) {
    r.status = kStatusRefinement;
    r.reason = e.what();
  } catch (const CapacityError& e) {
    r.status = kStatusCapacity;
    r.reason = e.what();
  } catch (const NumericalError& e) {
    r.status = kStatusNumerical;
    r.reason = e.what();
  } catch (const Error& e) {
    r.status = kStatusInvalid;
    r.reason = e.what();
  }
  if (cfg.record_wall_time) {
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return r;
}

namespace {

std::vector<RunResult> run_tasks(const ExperimentConfig& cfg, const std::vector<std::pair<int, int>>& tasks) {
  std::vector<RunResult> out(tasks.size());
  unsigned workers = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency())
                                      : static_cast<unsigned>(cfg.threads);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, tasks.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        out[i] = run_draw(cfg, tasks[i].first, tasks[i].second);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(tasks.size());
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

std::vector<RunResult> run_cell(const ExperimentConfig& cfg, int cell_id) {
  if (cell_id < 0 || static_cast<std::size_t>(cell_id) >= cfg.cells.size()) {
    throw ValidationError("run_cell: no cell " + std::to_string(cell_id));
  }
  if (cfg.draws < 1) throw ValidationError("draws must be >= 1");
  std::vector<std::pair<int, int>> tasks;
  for (int d = 0; d < cfg.draws; ++d) tasks.emplace_back(cell_id, d);
  return run_tasks(cfg, tasks);
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<int, int>> tasks;
  for (std::size_t c = 0; c < cfg.cells.size(); ++c) {
    for (int d = 0; d < cfg.draws; ++d) tasks.emplace_back(static_cast<int>(c), d);
  }
  return run_tasks(cfg, tasks);
}

void RunningMoments::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count), nb = static_cast<double>(other.count);
  const double delta = other.mean - mean;
  const double n = na + nb;
  mean += delta * nb / n;
  m2 += other.m2 + delta * delta * na * nb / n;
  count += other.count;
}

double RunningMoments::variance() const { return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1); }

std::uint64_t bootstrap_seed(std::uint64_t master_seed, int cell_id) {
  // separate stream: tag the master seed before deriving
  return derive_seed(master_seed ^ 0x626f6f7473747261ULL, static_cast<std::uint64_t>(cell_id), 0);
}

EnsembleStats aggregate(std::span<const RunResult> results, int bootstrap_resamples, std::uint64_t boot_seed) {
  if (results.empty()) throw ValidationError("aggregate: empty input");
  if (bootstrap_resamples < 1) throw ValidationError("aggregate: bootstrap_resamples must be >= 1");
  EnsembleStats s;
  const auto& first = results.front();
  s.cell_id = first.cell_id;
  s.model = first.model;
  s.n = first.n;
  s.k = first.k;
  s.m = first.m;
  std::vector<double> values;
  double ratio_sum = 0.0, t1_sum = 0.0;
  for (const auto& r : results) {
    if (r.cell_id != first.cell_id || r.model != first.model || r.n != first.n || r.k != first.k) {
      throw ValidationError("aggregate: results mix cells");
    }
    ++s.draws;
    s.checks_passed += r.checks_passed;
    s.checks_total += r.checks_total;
    if (!r.ok()) {
      ++s.failed;
      continue;
    }
    values.push_back(r.report.achieved);
    s.energy.add(r.report.achieved);
    ratio_sum += r.report.ratio;
    t1_sum += r.report.t1_prediction;
  }
  s.cell_failed = static_cast<double>(s.failed) > 0.1 * static_cast<double>(s.draws);
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean = s.stderr_of_mean = s.ci_low = s.ci_high = s.mean_ratio = s.mean_t1 = nan;
    s.stderr_undefined = true;
    s.cell_failed = true;
    return s;
  }
  const double n = static_cast<double>(values.size());
  s.mean = s.energy.mean;
  s.stderr_undefined = values.size() < 2;
  s.stderr_of_mean = s.stderr_undefined ? 0.0 : std::sqrt(s.energy.variance() / n);
  s.mean_ratio = ratio_sum / n;
  s.mean_t1 = t1_sum / n;
  Rng rng(boot_seed);
  std::vector<double> means(static_cast<std::size_t>(bootstrap_resamples));
  for (auto& mu : means) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += values[rng.below(values.size())];
    mu = acc / n;
  }
  std::sort(means.begin(), means.end());
  s.ci_low = percentile(means, 0.025);
  s.ci_high = percentile(means, 0.975);
  return s;
}

std::vector<EnsembleStats> aggregate_cells(std::span<const RunResult> results, const ExperimentConfig& cfg) {
  std::vector<EnsembleStats> out;
  std::size_t i = 0;
  while (i < results.size()) {
    std::size_t j = i;
    while (j < results.size() && results[j].cell_id == results[i].cell_id) ++j;
    out.push_back(aggregate(results.subspan(i, j - i), cfg.bootstrap_resamples,
                            bootstrap_seed(cfg.master_seed, results[i].cell_id)));
    i = j;
  }
  return out;
}

json to_json(const EnsembleStats& s) {
  return {{"cell_id", s.cell_id},
          {"model", model_name(s.model)},
          {"n", s.n},
          {"k", s.k},
          {"m", s.m},
          {"draws", s.draws},
          {"failed", s.failed},
          {"cell_failed", s.cell_failed},
          {"mean_energy", s.mean},
          {"stderr", s.stderr_of_mean},
          {"stderr_undefined", s.stderr_undefined},
          {"ci95", {s.ci_low, s.ci_high}},
          {"mean_ratio_to_lambda_max", s.mean_ratio},
          {"mean_t1", s.mean_t1},
          {"checks_passed", s.checks_passed},
          {"checks_total", s.checks_total}};
}

json to_json(const VerifyConfig& cfg) {
  json j = {{"seed", cfg.seed},
            {"test_ops", cfg.test_ops},
            {"hoeffding_draws", cfg.hoeffding_draws},
            {"delta", cfg.delta},
            {"corrupt_b_table", cfg.corrupt_b_table}};
  j["y"] = cfg.y ? json(*cfg.y) : json(nullptr);
  j["t"] = cfg.t ? json(*cfg.t) : json(nullptr);
  return j;
}

BoundCheckReport verify_suite(const VerifyConfig& cfg) {
  if (cfg.test_ops < 1) throw ValidationError("verify: test_ops must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ValidationError("verify: delta must lie in (0, 1)");
  const EnsembleSpec specs[] = {
      {Model::GaussianPauli, 3, 2, 0, 0},
      {Model::Syk, 6, 4, 0, 0},
      {Model::SparsePauli, 4, 2, 6, 0},
      {Model::SparseFermion, 8, 4, 6, 0},
  };
  BoundCheckReport report;
  std::uint64_t idx = 0;
  for (auto spec : specs) {
    spec.seed = derive_seed(cfg.seed, idx, 0);
    const auto inst = sample_instance(spec);
    const auto sched = schedule(inst);
    const double y = cfg.y.value_or(sched.y);
    const double t = cfg.t.value_or(sched.t);
    Schedule used = sched;
    used.y = y;
    used.t = t;
    auto rep = build_lindbladian(inst, y);
    if (cfg.corrupt_b_table && !rep.b_table.empty() && !rep.b_table[0].empty()) rep.b_table[0][0] ^= 1U;
    const auto jumps = build_jump_set(inst);
    const auto decomp = decompose_generator(rep);
    Rng rng(derive_seed(cfg.seed, idx, 1));
    EvolutionConfig evo;
    evo.t_final = t;

    BoundCheckReport sub;
    check_commutation_condition(rep, sub);
    check_locality_condition(inst, jumps, rep.b_table, sub);
    check_b_sum_lemma(rep, sub);
    check_first_order(rep, decomp, sub);
    check_piece_norm_bounds(rep, decomp, cfg.test_ops, rng, sub);
    check_channel(rep, t, cfg.test_ops, rng, sub);
    check_duality(rep, evo, sub);
    check_schedule_guards(inst, used, sub);
    prefix_checks(sub, std::string(model_name(spec.model)) + "/");
    report.append(sub);
    ++idx;
  }
  if (cfg.hoeffding_draws > 0) {
    const EnsembleSpec hspec{Model::SparsePauli, 8, 2, 24, 0};
    double worst = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < cfg.hoeffding_draws; ++d) {
      auto spec = hspec;
      spec.seed = derive_seed(cfg.seed, idx, static_cast<std::uint64_t>(d));
      worst = std::max(worst, max_eigenvalue(instance_to_dense(sample_instance(spec))));
    }
    BoundCheckReport sub;
    check_hoeffding_tail(worst, std::ldexp(1.0, hspec.n), cfg.delta, sub);
    prefix_checks(sub, "sparse_pauli_n8/");
    report.append(sub);
  }
  return report;
}

}  // namespace dissip
