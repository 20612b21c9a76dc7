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

#include "dissip/cli.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dissip/analysis.hpp"
#include "dissip/ensembles.hpp"
#include "dissip/errors.hpp"
#include "dissip/evolution.hpp"
#include "dissip/experiment.hpp"
#include "dissip/io.hpp"
#include "dissip/lindblad.hpp"

namespace dissip {
namespace {

using nlohmann::json;

struct InstanceOpts {
  std::string model = "sparse_pauli";
  int n = 4;
  int k = 2;
  int m = 8;
  std::uint64_t seed = 0;
  std::string instance_path;
};

void add_instance_opts(CLI::App* cmd, InstanceOpts& o) {
  cmd->add_option("--model", o.model, "gaussian_pauli | syk | sparse_pauli | sparse_fermion")->capture_default_str();
  cmd->add_option("--n", o.n, "qubits (spin) or Majorana modes (fermion)")->capture_default_str();
  cmd->add_option("--k", o.k, "locality")->capture_default_str();
  cmd->add_option("--m", o.m, "term count for sampled models")->capture_default_str();
  cmd->add_option("--seed", o.seed, "instance seed")->capture_default_str();
}

EnsembleSpec spec_of(const InstanceOpts& o) {
  EnsembleSpec s{parse_model(o.model), o.n, o.k, o.m, o.seed};
  if (!is_sampled(s.model)) s.m = 0;
  s.validate();
  return s;
}

json spec_json(const EnsembleSpec& s) {
  return {{"model", model_name(s.model)}, {"n", s.n}, {"k", s.k}, {"m", s.m}, {"seed", s.seed}};
}

HamiltonianInstance load_instance(const InstanceOpts& o, json& resolved) {
  if (!o.instance_path.empty()) {
    resolved["instance"] = o.instance_path;
    return instance_from_json(read_json_file(o.instance_path));
  }
  const auto spec = spec_of(o);
  resolved["instance"] = spec_json(spec);
  return sample_instance(spec);
}

void echo(std::ostream& err, const std::string& cmd, const json& resolved) {
  err << "resolved config (" << cmd << "): " << resolved.dump() << '\n';
}

Method parse_method_flag(const std::string& s) {
  if (s == "rk4") return Method::Rk4;
  if (s == "expm") return Method::Expm;
  throw ValidationError("--method must be rk4 or expm, got '" + s + "'");
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dissipative optimization of random k-local Hamiltonians"};
  app.name("dissip");
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  // sample
  InstanceOpts sample_opts;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "Draw one Hamiltonian instance and print it as JSON");
  add_instance_opts(sample, sample_opts);
  sample->add_option("--out", sample_out, "also write the instance to this path");

  // evolve
  InstanceOpts evolve_opts;
  std::optional<double> ev_y, ev_t, ev_cy, ev_ct;
  std::string ev_method = "rk4";
  int ev_steps = 0;
  double ev_guard = 0.1;
  std::string ev_traj;
  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve the maximally mixed state and report the energy");
  add_instance_opts(evolve_cmd, evolve_opts);
  evolve_cmd->add_option("--instance", evolve_opts.instance_path, "instance JSON (overrides the model flags)");
  evolve_cmd->add_option("--y", ev_y, "coupling y (default: schedule)");
  evolve_cmd->add_option("--t", ev_t, "evolution time (default: schedule)");
  evolve_cmd->add_option("--c-y", ev_cy, "schedule constant c_y");
  evolve_cmd->add_option("--c-t", ev_ct, "schedule constant c_t");
  evolve_cmd->add_option("--method", ev_method, "rk4 | expm")->capture_default_str();
  evolve_cmd->add_option("--steps", ev_steps, "RK4 steps (0: automatic)")->capture_default_str();
  evolve_cmd->add_option("--step-guard", ev_guard, "required norm-bound * dt")->capture_default_str();
  evolve_cmd->add_option("--trajectory", ev_traj, "write per-step CSV here");

  // sweep
  std::string sweep_config;
  std::optional<int> sweep_threads;
  std::string sweep_results, sweep_stats, sweep_manifest;
  auto* sweep = app.add_subcommand("sweep", "Run an ensemble sweep from a JSON config");
  sweep->add_option("--config", sweep_config, "experiment config JSON")->required();
  sweep->add_option("--threads", sweep_threads, "worker threads (0: hardware)");
  sweep->add_option("--results", sweep_results, "results CSV path");
  sweep->add_option("--stats", sweep_stats, "stats JSON path");
  sweep->add_option("--manifest", sweep_manifest, "manifest JSON path");

  // verify
  VerifyConfig vcfg;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "Run the bound-check suite");
  verify->add_option("--seed", vcfg.seed, "suite seed")->capture_default_str();
  verify->add_option("--test-ops", vcfg.test_ops, "random test operators per instance")->capture_default_str();
  verify->add_option("--hoeffding-draws", vcfg.hoeffding_draws, "draws for the spectral tail check")
      ->capture_default_str();
  verify->add_option("--delta", vcfg.delta, "tail probability")->capture_default_str();
  verify->add_option("--y", vcfg.y, "override the schedule coupling");
  verify->add_option("--t", vcfg.t, "override the schedule time");
  verify->add_flag("--corrupt-b-table", vcfg.corrupt_b_table, "negative control: flip one anticommutation flag");
  verify->add_option("--out", verify_out, "also write the report JSON here");

  // spectrum
  InstanceOpts spec_opts;
  bool spec_all = false;
  double spec_delta = 0.01;
  auto* spectrum = app.add_subcommand("spectrum", "Exact spectrum summary of one instance");
  add_instance_opts(spectrum, spec_opts);
  spectrum->add_option("--instance", spec_opts.instance_path, "instance JSON (overrides the model flags)");
  spectrum->add_flag("--eigenvalues", spec_all, "print every eigenvalue");
  spectrum->add_option("--delta", spec_delta, "tail probability for the reference bound")->capture_default_str();

  // ratio-stats
  std::string rs_model = "sparse_pauli";
  int rs_k = 2;
  std::vector<int> rs_n{8, 16, 32, 64, 128};
  int rs_m = 0;
  int rs_draws = 200;
  std::uint64_t rs_seed = 0;
  auto* ratio = app.add_subcommand("ratio-stats", "Monte Carlo of h_glo^2/h_loc without dense matrices");
  ratio->add_option("--model", rs_model, "ensemble")->capture_default_str();
  ratio->add_option("--k", rs_k, "locality")->capture_default_str();
  ratio->add_option("--n", rs_n, "system sizes")->delimiter(',')->capture_default_str();
  ratio->add_option("--m", rs_m, "terms for sampled models (0: ceil(4 n ln n / k))")->capture_default_str();
  ratio->add_option("--draws", rs_draws, "draws per size")->capture_default_str();
  ratio->add_option("--seed", rs_seed, "master seed")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*sample) {
      const auto spec = spec_of(sample_opts);
      json resolved = spec_json(spec);
      if (!sample_out.empty()) resolved["out"] = sample_out;
      echo(err, "sample", resolved);
      const auto text = serialize_instance(sample_instance(spec));
      if (!sample_out.empty()) write_text_file(sample_out, text + "\n");
      out << text << '\n';
      return kExitOk;
    }

    if (*evolve_cmd) {
      json resolved;
      const auto inst = load_instance(evolve_opts, resolved);
      check_dense_capacity(inst.qubits(), "evolve");
      double y = 0.0, t = 0.0;
      if (ev_y && ev_t) {
        y = *ev_y;
        t = *ev_t;
      } else {
        const auto s = schedule(inst, ev_cy, ev_ct);
        y = ev_y.value_or(s.y);
        t = ev_t.value_or(s.t);
      }
      EvolutionConfig cfg;
      cfg.t_final = t;
      cfg.method = parse_method_flag(ev_method);
      cfg.steps = ev_steps;
      cfg.step_guard = ev_guard;
      resolved["y"] = y;
      resolved["t"] = t;
      resolved["method"] = ev_method;
      resolved["steps"] = ev_steps;
      resolved["step_guard"] = ev_guard;
      if (!ev_traj.empty()) resolved["trajectory"] = ev_traj;
      echo(err, "evolve", resolved);
      const auto rep = build_lindbladian(inst, y);
      std::vector<TrajectoryRow> rows;
      TrajectoryObserver obs;
      if (!ev_traj.empty()) obs = [&](const TrajectoryRow& r) { rows.push_back(r); };
      const auto rho = evolve(rep, maximally_mixed(inst.qubits()), cfg, obs);
      EnergyReport report;
      report.y = y;
      report.t = t;
      report.achieved = energy(rho.rho, rep.h_dense);
      report.t1_prediction = first_order_term(inst, y, t);
      report.residual = report.achieved - report.t1_prediction;
      report.lambda_max = max_eigenvalue(rep.h_dense);
      report.ratio = report.lambda_max != 0.0 ? report.achieved / report.lambda_max : 0.0;
      if (!ev_traj.empty()) {
        std::ostringstream csv;
        write_trajectory_csv(csv, rows);
        write_text_file(ev_traj, csv.str());
      }
      json j = to_json(report);
      j["energy"] = report.achieved;
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (*sweep) {
      auto cfg = experiment_config_from_json(read_json_file(sweep_config));
      if (sweep_threads) cfg.threads = *sweep_threads;
      if (!sweep_results.empty()) cfg.results_csv = sweep_results;
      if (!sweep_stats.empty()) cfg.stats_json = sweep_stats;
      if (!sweep_manifest.empty()) cfg.manifest_json = sweep_manifest;
      cfg.validate();
      echo(err, "sweep", to_json(cfg));
      const auto started = std::chrono::system_clock::now();
      const auto results = run_experiment(cfg);
      const auto stats = aggregate_cells(results, cfg);
      const auto finished = std::chrono::system_clock::now();
      write_results(results, stats, cfg);
      if (!cfg.manifest_json.empty()) {
        write_text_file(cfg.manifest_json, make_manifest(cfg, started, finished).dump(2) + "\n");
      }
      out << stats_to_json(stats, results, cfg).dump(2) << '\n';
      const bool any_failed = std::any_of(stats.begin(), stats.end(), [](const EnsembleStats& s) { return s.cell_failed; });
      return any_failed ? kExitCheckFailed : kExitOk;
    }

    if (*verify) {
      echo(err, "verify", to_json(vcfg));
      const auto report = verify_suite(vcfg);
      const auto doc = to_json(report);
      if (!verify_out.empty()) write_text_file(verify_out, doc.dump(2) + "\n");
      out << doc.dump(2) << '\n';
      for (const auto& c : report.checks) {
        if (!c.pass) {
          err << (c.severity == Severity::Error ? "FAIL " : "WARN ") << c.name << ": lhs=" << c.lhs << " rhs=" << c.rhs
              << " tol=" << c.tolerance << '\n';
        }
      }
      return report.all_pass() ? kExitOk : kExitCheckFailed;
    }

    if (*spectrum) {
      json resolved;
      const auto inst = load_instance(spec_opts, resolved);
      resolved["delta"] = spec_delta;
      echo(err, "spectrum", resolved);
      check_dense_capacity(inst.qubits(), "spectrum");
      const auto h = instance_to_dense(inst);
      Eigen::SelfAdjointEigenSolver<DenseOperator> es(h, Eigen::EigenvaluesOnly);
      const auto& ev = es.eigenvalues();
      const double dim = static_cast<double>(h.rows());
      json j = {{"dim", h.rows()},
                {"lambda_max", ev.maxCoeff()},
                {"lambda_min", ev.minCoeff()},
                {"h_loc", inst.h_loc},
                {"h_glo", inst.h_glo},
                {"hoeffding_bound", std::sqrt(8.0 * std::log(2.0 * dim / spec_delta))}};
      if (spec_all) j["eigenvalues"] = std::vector<double>(ev.data(), ev.data() + ev.size());
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (*ratio) {
      const Model model = parse_model(rs_model);
      std::vector<RatioCell> cells;
      for (int n : rs_n) {
        const int m = is_sampled(model) ? (rs_m > 0 ? rs_m : sparse_m_rule(n, rs_k)) : 0;
        EnsembleSpec{model, n, rs_k, m, 0}.validate();
        cells.push_back({model, n, rs_k, m});
      }
      json resolved = {{"model", rs_model}, {"k", rs_k}, {"n", rs_n}, {"draws", rs_draws}, {"seed", rs_seed}};
      json ms = json::array();
      for (const auto& c : cells) ms.push_back(c.m);
      resolved["m"] = ms;
      echo(err, "ratio-stats", resolved);
      const auto rows = glo_loc_ratio_stats(cells, rs_draws, rs_seed);
      json table = json::array();
      std::vector<double> xs, ys;
      for (const auto& r : rows) {
        table.push_back({{"n", r.cell.n}, {"k", r.cell.k}, {"m", r.cell.m}, {"draws", r.draws},
                         {"mean_ratio", r.mean}, {"stderr", r.stderr_of_mean}});
        xs.push_back(r.cell.n);
        ys.push_back(r.mean);
      }
      json j = {{"rows", table}};
      if (xs.size() >= 2) j["log_log_slope"] = log_log_slope(xs, ys);
      out << j.dump(2) << '\n';
      return kExitOk;
    }
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const RefinementError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitConfigError;
}

}  // namespace dissip
