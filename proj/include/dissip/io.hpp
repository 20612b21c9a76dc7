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

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dissip/experiment.hpp"

namespace dissip {

inline constexpr const char* kResultsCsvHeader =
    "cell_id,draw,seed,n,k,m,model,y,t,energy,t1,residual,lambda_max,ratio,wall_ms,status";
inline constexpr const char* kStatsSchema = "dissip.stats/1";

void write_results_csv(std::ostream& out, std::span<const RunResult> results);

/// Parses what write_results_csv emits. Report fields not in the CSV stay zero.
std::vector<RunResult> read_results_csv(std::istream& in);

/// Stats document:
///   { "schema": "dissip.stats/1", "master_seed": uint, "draws": int,
///     "cells": [ { cell_id, model, n, k, m, draws, failed, cell_failed,
///                  mean_energy, stderr, stderr_undefined, ci95: [lo, hi],
///                  mean_ratio_to_lambda_max, mean_t1, checks_passed,
///                  checks_total } ],
///     "failures": [ { cell_id, draw, status, reason } ] }
/// Non-finite numbers serialize as null.
nlohmann::json stats_to_json(std::span<const EnsembleStats> stats, std::span<const RunResult> results,
                             const ExperimentConfig& cfg);

/// Empty when the document matches the layout above.
std::vector<std::string> validate_stats_json(const nlohmann::json& doc);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
std::string iso8601_utc(std::chrono::system_clock::time_point tp);

nlohmann::json make_manifest(const ExperimentConfig& cfg, std::chrono::system_clock::time_point started,
                             std::chrono::system_clock::time_point finished);

std::string version_string();

/// Writes each path that is non-empty in cfg. Throws IoError naming the path.
void write_results(std::span<const RunResult> results, std::span<const EnsembleStats> stats,
                   const ExperimentConfig& cfg);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Throws ValidationError carrying "source:line:column: message".
nlohmann::json parse_json_text(const std::string& text, const std::string& source);
nlohmann::json read_json_file(const std::string& path);

}  // namespace dissip
