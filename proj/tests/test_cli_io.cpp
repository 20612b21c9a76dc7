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

#include <filesystem>
#include <sstream>

#include "dissip/cli.hpp"
#include "dissip/errors.hpp"
#include "dissip/io.hpp"

using namespace dissip;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = parse_and_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dissip_test_cli_io";
  fs::create_directories(dir);
  return dir / name;
}

RunResult sample_result() {
  RunResult r;
  r.cell_id = 2;
  r.draw = 7;
  r.seed = 18446744073709551615ULL;
  r.model = Model::SparseFermion;
  r.n = 12;
  r.k = 4;
  r.m = 12;
  r.report = {0.123456789012345678, 0.1, 0.023456789012345678, 2.5, 0.0493827156049383, -1.0 / 3.0, 1.0 / 7.0};
  r.wall_ms = 12.5;
  r.status = kStatusOk;
  return r;
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("empty results give a header-only CSV") {
  std::ostringstream out;
  write_results_csv(out, {});
  CHECK(out.str() == "cell_id,draw,seed,n,k,m,model,y,t,energy,t1,residual,lambda_max,ratio,wall_ms,status\n");
}

TEST_CASE("CSV row round trip") {
  const auto r = sample_result();
  std::ostringstream out;
  write_results_csv(out, std::vector<RunResult>{r});
  std::istringstream in(out.str());
  const auto back = read_results_csv(in);
  REQUIRE(back.size() == 1);
  const auto& b = back[0];
  CHECK(b.cell_id == r.cell_id);
  CHECK(b.draw == r.draw);
  CHECK(b.seed == r.seed);
  CHECK(b.model == r.model);
  CHECK(b.m == r.m);
  CHECK(b.report.achieved == r.report.achieved);
  CHECK(b.report.y == r.report.y);
  CHECK(b.report.t == r.report.t);
  CHECK(b.report.ratio == r.report.ratio);
  CHECK(b.wall_ms == r.wall_ms);
  CHECK(b.status == r.status);
  // shortest round-trip formatting
  CHECK(out.str().find(",0.1,") != std::string::npos);
  std::istringstream junk("a,b\n");
  CHECK_THROWS_AS(read_results_csv(junk), ValidationError);
}

TEST_CASE("stats JSON schema") {
  ExperimentConfig cfg;
  cfg.master_seed = 3;
  cfg.draws = 2;
  auto a = sample_result(), b = sample_result();
  b.draw = 8;
  b.status = kStatusNumerical;
  b.reason = "non-finite";
  const std::vector<RunResult> rs{a, b};
  const std::vector<EnsembleStats> stats{aggregate(rs, 100, 1)};
  const auto doc = stats_to_json(stats, rs, cfg);
  CHECK(validate_stats_json(doc).empty());
  CHECK(doc.at("failures").size() == 1);
  // reparse from text, as a consumer would
  CHECK(validate_stats_json(nlohmann::json::parse(doc.dump())).empty());

  auto broken = doc;
  broken["cells"][0].erase("mean_energy");
  CHECK_FALSE(validate_stats_json(broken).empty());
  broken = doc;
  broken["schema"] = "other";
  CHECK_FALSE(validate_stats_json(broken).empty());
  broken = doc;
  broken["cells"][0]["ci95"] = 1.0;
  CHECK_FALSE(validate_stats_json(broken).empty());
}

TEST_CASE("hash, timestamps, manifest") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
  CHECK(iso8601_utc(std::chrono::system_clock::time_point{}) == "1970-01-01T00:00:00Z");
  ExperimentConfig cfg;
  const auto now = std::chrono::system_clock::now();
  const auto m1 = make_manifest(cfg, now, now);
  cfg.master_seed = 1;
  const auto m2 = make_manifest(cfg, now, now);
  CHECK(m1.at("config_hash") != m2.at("config_hash"));
  CHECK(m1.at("version") == version_string());
}

TEST_CASE("JSON parse errors carry line and column") {
  try {
    parse_json_text("{\n  \"a\": ,\n}", "cfg.json");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).rfind("cfg.json:2:8:", 0) == 0);
  }
  CHECK_THROWS_AS(read_json_file("/nonexistent/dir/x.json"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/x.json", "{}"), IoError);
}

TEST_CASE("cli sample prints a round-trippable instance") {
  const auto r = cli({"sample", "--model", "sparse_pauli", "--n", "4", "--k", "2", "--m", "5", "--seed", "7"});
  CHECK(r.code == 0);
  const auto inst = instance_from_json(nlohmann::json::parse(r.out));
  CHECK(inst.terms.size() == 5);
  CHECK(serialize_instance(inst) + "\n" == r.out);
  CHECK(r.err.find("resolved config") != std::string::npos);
}

TEST_CASE("cli evolve") {
  auto r = cli({"evolve", "--t", "0"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("energy").get<double>() == 0.0);
  CHECK(r.out.find("\"energy\": 0.0") != std::string::npos);

  r = cli({"evolve", "--method", "expm"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("energy").get<double>() > 0.0);

  const auto inst_path = scratch("inst.json").string();
  CHECK(cli({"sample", "--n", "3", "--k", "2", "--m", "3", "--out", inst_path}).code == 0);
  const auto traj = scratch("traj.csv").string();
  r = cli({"evolve", "--instance", inst_path, "--y", "-0.2", "--t", "0.1", "--trajectory", traj});
  CHECK(r.code == 0);
  CHECK(read_text_file(traj).rfind("step,time,energy,trace_error,min_eig\n", 0) == 0);
}

TEST_CASE("cli config errors exit 2") {
  CHECK(cli({"evolve", "--bogus"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"sample", "--model", "ising"}).code == 2);
  CHECK(cli({"sample", "--n", "4", "--k", "6"}).code == 2);

  const auto bad = scratch("bad.json").string();
  write_text_file(bad, "{\n  \"draws\": 2,\n  \"cells\": [ }\n");
  auto r = cli({"sweep", "--config", bad});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.json:3:") != std::string::npos);

  set_dense_qubit_limit(2);
  r = cli({"evolve", "--n", "4"});
  set_dense_qubit_limit(std::nullopt);
  CHECK(r.code == 2);
  CHECK(r.err.find("DISSIP_DENSE_LIMIT") != std::string::npos);

  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli verify") {
  auto r = cli({"verify", "--seed", "42"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("all_pass").get<bool>());
  r = cli({"verify", "--corrupt-b-table", "--hoeffding-draws", "0"});
  CHECK(r.code == 1);
}

TEST_CASE("cli sweep writes results, stats and manifest") {
  const auto cfg_path = scratch("sweep.json").string();
  const auto results = scratch("results.csv").string();
  const auto stats = scratch("stats.json").string();
  const auto manifest = scratch("manifest.json").string();
  write_text_file(cfg_path, R"({"master_seed": 4, "draws": 3, "record_wall_time": false,
    "bootstrap_resamples": 200,
    "cells": [{"model": "sparse_pauli", "n": 3, "k": 2, "m": 4}]})");
  auto r = cli({"sweep", "--config", cfg_path, "--results", results, "--stats", stats, "--manifest", manifest});
  CHECK(r.code == 0);
  const auto first = read_text_file(results);
  CHECK(validate_stats_json(read_json_file(stats)).empty());
  const auto man = read_json_file(manifest);
  CHECK(man.at("config_hash").get<std::string>().rfind("fnv1a64:", 0) == 0);
  r = cli({"sweep", "--config", cfg_path, "--results", results, "--threads", "3"});
  CHECK(r.code == 0);
  CHECK(read_text_file(results) == first);
}

TEST_CASE("cli spectrum and ratio-stats") {
  auto r = cli({"spectrum", "--model", "sparse_pauli", "--n", "1", "--k", "1", "--m", "1", "--eigenvalues"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("lambda_max").get<double>() == doctest::Approx(1.0));
  CHECK(j.at("eigenvalues").size() == 2);
  r = cli({"ratio-stats", "--n", "8,16", "--draws", "30"});
  CHECK(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j.at("rows").size() == 2);
  CHECK(j.contains("log_log_slope"));
  CHECK(cli({"ratio-stats", "--draws", "3"}).code == 2);
}

}  // TEST_SUITE
