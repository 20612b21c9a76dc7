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

#include "dissip/analysis.hpp"
#include "dissip/ensembles.hpp"
#include "dissip/evolution.hpp"

namespace dissip {

/// One grid cell. Either the schedule constants (c_y, c_t) or an explicit
/// (y, t) pair; missing pieces fall back to the default schedule.
struct CellConfig {
  EnsembleSpec spec;  // seed is ignored, draws get derived seeds
  std::optional<double> c_y;
  std::optional<double> c_t;
  std::optional<double> y;
  std::optional<double> t;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 0;
  int draws = 1;
  std::vector<CellConfig> cells;
  EvolutionConfig evolution;  // t_final comes from the cell
  bool enumerate_signs = false;
  bool run_bound_checks = false;
  int bootstrap_resamples = 10000;
  int threads = 1;
  bool record_wall_time = true;
  std::string results_csv;
  std::string stats_json;
  std::string manifest_json;

  /// Throws ValidationError / CapacityError.
  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);

// status codes recorded per draw
inline constexpr const char* kStatusOk = "ok";
inline constexpr const char* kStatusRefinement = "refinement_required";
inline constexpr const char* kStatusNumerical = "numerical_error";
inline constexpr const char* kStatusCapacity = "capacity_exceeded";
inline constexpr const char* kStatusInvalid = "invalid";
inline constexpr const char* kStatusCheckFailed = "check_failed";

struct RunResult {
  int cell_id = 0;
  int draw = 0;
  std::uint64_t seed = 0;
  Model model = Model::SparsePauli;
  int n = 0;
  int k = 0;
  int m = 0;
  EnergyReport report;
  double wall_ms = 0.0;
  std::string status = kStatusOk;
  std::string reason;
  int checks_passed = 0;
  int checks_total = 0;

  bool ok() const { return status == kStatusOk; }
};

/// Resolves (y, t) for a cell on a concrete instance.
std::pair<double, double> resolve_schedule(const CellConfig& cell, const HamiltonianInstance& instance);

RunResult run_draw(const ExperimentConfig& cfg, int cell_id, int draw);

/// Draws of one cell in draw order. Per-draw failures are recorded, not thrown.
std::vector<RunResult> run_cell(const ExperimentConfig& cfg, int cell_id);

/// Every cell, ordered by (cell id, draw).
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

/// Welford accumulator with the pairwise (Chan) merge.
struct RunningMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningMoments& other);
  double variance() const;  // sample variance, 0 for count < 2
};

struct EnsembleStats {
  int cell_id = 0;
  Model model = Model::SparsePauli;
  int n = 0;
  int k = 0;
  int m = 0;
  std::size_t draws = 0;
  std::size_t failed = 0;
  bool cell_failed = false;  // more than 10% of draws failed
  RunningMoments energy;
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  bool stderr_undefined = false;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_ratio = 0.0;
  double mean_t1 = 0.0;
  int checks_passed = 0;
  int checks_total = 0;
};

/// Statistics over one homogeneous cell. The bootstrap uses its own stream
/// seeded from bootstrap_seed, independent of the instance sampling.
EnsembleStats aggregate(std::span<const RunResult> results, int bootstrap_resamples = 10000,
                        std::uint64_t bootstrap_seed = 0);

std::vector<EnsembleStats> aggregate_cells(std::span<const RunResult> results, const ExperimentConfig& cfg);

std::uint64_t bootstrap_seed(std::uint64_t master_seed, int cell_id);

nlohmann::json to_json(const EnsembleStats& stats);

struct VerifyConfig {
  std::uint64_t seed = 42;
  int test_ops = 8;
  int hoeffding_draws = 20;
  double delta = 0.01;
  std::optional<double> y;  // override the schedule
  std::optional<double> t;
  bool corrupt_b_table = false;  // negative control
};

nlohmann::json to_json(const VerifyConfig& cfg);

BoundCheckReport verify_suite(const VerifyConfig& cfg);

}  // namespace dissip
