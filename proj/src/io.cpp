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

#include "dissip/io.hpp"

#include <charconv>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dissip/errors.hpp"
#include "dissip/format.hpp"

#ifndef DISSIP_VERSION
#define DISSIP_VERSION "unknown"
#endif

namespace dissip {
namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_int(const std::string& s, const char* column) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError(std::string("csv: bad integer in column ") + column + ": '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, const char* column) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ValidationError(std::string("csv: bad number in column ") + column + ": '" + s + "'");
  }
  return v;
}

bool is_number_or_null(const json& j) { return j.is_number() || j.is_null(); }

}  // namespace

void write_results_csv(std::ostream& out, std::span<const RunResult> results) {
  out << kResultsCsvHeader << '\n';
  for (const auto& r : results) {
    out << r.cell_id << ',' << r.draw << ',' << r.seed << ',' << r.n << ',' << r.k << ',' << r.m << ','
        << model_name(r.model) << ',' << format_double(r.report.y) << ',' << format_double(r.report.t) << ','
        << format_double(r.report.achieved) << ',' << format_double(r.report.t1_prediction) << ','
        << format_double(r.report.residual) << ',' << format_double(r.report.lambda_max) << ','
        << format_double(r.report.ratio) << ',' << format_double(r.wall_ms) << ',' << r.status << '\n';
  }
}

std::vector<RunResult> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader) throw ValidationError("csv: missing or unexpected header");
  std::vector<RunResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 16) throw ValidationError("csv: expected 16 fields, got " + std::to_string(f.size()));
    RunResult r;
    r.cell_id = parse_int<int>(f[0], "cell_id");
    r.draw = parse_int<int>(f[1], "draw");
    r.seed = parse_int<std::uint64_t>(f[2], "seed");
    r.n = parse_int<int>(f[3], "n");
    r.k = parse_int<int>(f[4], "k");
    r.m = parse_int<int>(f[5], "m");
    r.model = parse_model(f[6]);
    r.report.y = parse_double(f[7], "y");
    r.report.t = parse_double(f[8], "t");
    r.report.achieved = parse_double(f[9], "energy");
    r.report.t1_prediction = parse_double(f[10], "t1");
    r.report.residual = parse_double(f[11], "residual");
    r.report.lambda_max = parse_double(f[12], "lambda_max");
    r.report.ratio = parse_double(f[13], "ratio");
    r.wall_ms = parse_double(f[14], "wall_ms");
    r.status = f[15];
    out.push_back(std::move(r));
  }
  return out;
}

json stats_to_json(std::span<const EnsembleStats> stats, std::span<const RunResult> results,
                   const ExperimentConfig& cfg) {
  json cells = json::array();
  for (const auto& s : stats) cells.push_back(to_json(s));
  json failures = json::array();
  for (const auto& r : results) {
    if (r.ok()) continue;
    failures.push_back({{"cell_id", r.cell_id}, {"draw", r.draw}, {"status", r.status}, {"reason", r.reason}});
  }
  return {{"schema", kStatsSchema},
          {"master_seed", cfg.master_seed},
          {"draws", cfg.draws},
          {"cells", std::move(cells)},
          {"failures", std::move(failures)}};
}

std::vector<std::string> validate_stats_json(const json& doc) {
  std::vector<std::string> errs;
  auto need = [&](const json& obj, const char* key, auto pred, const char* what, const std::string& where) {
    if (!obj.contains(key)) {
      errs.push_back(where + ": missing '" + key + "'");
    } else if (!pred(obj.at(key))) {
      errs.push_back(where + ": '" + key + "' must be " + what);
    }
  };
  const auto is_uint = [](const json& j) { return j.is_number_unsigned(); };
  const auto is_int = [](const json& j) { return j.is_number_integer(); };
  const auto is_bool = [](const json& j) { return j.is_boolean(); };
  const auto is_str = [](const json& j) { return j.is_string(); };
  const auto is_num = [](const json& j) { return is_number_or_null(j); };
  if (!doc.is_object()) return {"document must be an object"};
  need(doc, "schema", [](const json& j) { return j.is_string() && j.get<std::string>() == kStatsSchema; },
       "the stats schema tag", "root");
  need(doc, "master_seed", is_uint, "an unsigned integer", "root");
  need(doc, "draws", is_int, "an integer", "root");
  need(doc, "cells", [](const json& j) { return j.is_array(); }, "an array", "root");
  need(doc, "failures", [](const json& j) { return j.is_array(); }, "an array", "root");
  if (doc.contains("cells") && doc.at("cells").is_array()) {
    std::size_t i = 0;
    for (const auto& c : doc.at("cells")) {
      const std::string where = "cells[" + std::to_string(i++) + "]";
      if (!c.is_object()) {
        errs.push_back(where + ": must be an object");
        continue;
      }
      for (const char* key : {"cell_id", "n", "k", "m", "draws", "failed", "checks_passed", "checks_total"}) {
        need(c, key, is_int, "an integer", where);
      }
      need(c, "model", is_str, "a string", where);
      for (const char* key : {"cell_failed", "stderr_undefined"}) need(c, key, is_bool, "a boolean", where);
      for (const char* key : {"mean_energy", "stderr", "mean_ratio_to_lambda_max", "mean_t1"}) {
        need(c, key, is_num, "a number or null", where);
      }
      need(c, "ci95",
           [](const json& j) { return j.is_array() && j.size() == 2 && is_number_or_null(j[0]) && is_number_or_null(j[1]); },
           "a two-element number array", where);
      if (c.size() != 16) errs.push_back(where + ": unexpected extra keys");
    }
  }
  if (doc.contains("failures") && doc.at("failures").is_array()) {
    std::size_t i = 0;
    for (const auto& f : doc.at("failures")) {
      const std::string where = "failures[" + std::to_string(i++) + "]";
      if (!f.is_object()) {
        errs.push_back(where + ": must be an object");
        continue;
      }
      need(f, "cell_id", is_int, "an integer", where);
      need(f, "draw", is_int, "an integer", where);
      need(f, "status", is_str, "a string", where);
      need(f, "reason", is_str, "a string", where);
    }
  }
  return errs;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string version_string() { return DISSIP_VERSION; }

json make_manifest(const ExperimentConfig& cfg, std::chrono::system_clock::time_point started,
                   std::chrono::system_clock::time_point finished) {
  const auto resolved = to_json(cfg);
  return {{"config_hash", "fnv1a64:" + hex64(fnv1a64(resolved.dump()))},
          {"version", version_string()},
          {"started", iso8601_utc(started)},
          {"finished", iso8601_utc(finished)},
          {"config", resolved}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from '" + path + "' failed");
  return ss.str();
}

void write_results(std::span<const RunResult> results, std::span<const EnsembleStats> stats,
                   const ExperimentConfig& cfg) {
  if (!cfg.results_csv.empty()) {
    std::ostringstream csv;
    write_results_csv(csv, results);
    write_text_file(cfg.results_csv, csv.str());
  }
  if (!cfg.stats_json.empty()) write_text_file(cfg.stats_json, stats_to_json(stats, results, cfg).dump(2) + "\n");
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character
    const std::size_t pos = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                          e.what() + ")");
  }
}

json read_json_file(const std::string& path) { return parse_json_text(read_text_file(path), path); }

}  // namespace dissip
