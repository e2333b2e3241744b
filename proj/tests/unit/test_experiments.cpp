// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vgqec/experiments.hpp"

using namespace vgqec;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_interpolation() {
  ExperimentConfig cfg = default_config(ExperimentKind::Interpolation);
  cfg.grid = {0.2, 0.8};
  cfg.optimizer.restarts = 1;
  cfg.optimizer.max_evals = 25;
  cfg.optimizer.seed = 77;
  cfg.sdp.primal_tol = cfg.sdp.dual_tol = 1e-6;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides and the Table of T1/T2", "[experiments]") {
  nlohmann::json j = {{"experiment", "thermal"}};
  ExperimentConfig cfg = parse_experiment_config(j);
  REQUIRE(cfg.noise.model == "thermal");
  REQUIRE(cfg.noise.t1 == std::vector<double>{97.51, 127.61, 92.68, 79.36, 19.76});
  REQUIRE(cfg.noise.t2 == std::vector<double>{178.3, 109.28, 120.95, 35.71, 19.4});
  REQUIRE(cfg.grid.size() == 6);
  REQUIRE(cfg.biconvex.restarts == 5);
  REQUIRE(cfg.biconvex.iterations == 300);

  nlohmann::json j2 = {{"experiment", "interpolation"},
                       {"grid", {0.0, 0.5, 1.0}},
                       {"optimizer", {{"kind", "NelderMead"}, {"restarts", 3}, {"seed", 9}}},
                       {"output", "x.csv"}};
  ExperimentConfig cfg2 = parse_experiment_config(j2);
  REQUIRE(cfg2.grid == std::vector<double>{0.0, 0.5, 1.0});
  REQUIRE(cfg2.optimizer.restarts == 3);
  REQUIRE(cfg2.optimizer.seed == 9);
  REQUIRE(cfg2.output == "x.csv");
}

TEST_CASE("config parsing: errors name the offending key", "[experiments]") {
  auto expect_key = [](nlohmann::json j, const std::string& key) {
    try {
      parse_experiment_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      REQUIRE(std::string(e.what()).find("'" + key + "'") != std::string::npos);
    }
  };
  expect_key(nlohmann::json::object(), "experiment");
  expect_key({{"experiment", "nope"}}, "experiment");
  expect_key({{"experiment", "thermal"}, {"grid", "zzz"}}, "grid");
  expect_key({{"experiment", "thermal"}, {"grid", {2.0, 1.0}}}, "grid");
  expect_key({{"experiment", "thermal"}, {"optimizer", {{"restarts", 0}}}}, "optimizer.restarts");
  expect_key({{"experiment", "thermal"}, {"optimizer", {{"seed", "abc"}}}}, "optimizer.seed");
  expect_key({{"experiment", "thermal"}, {"noise", {{"t1", {1.0}}, {"t2", {1.0, 2.0}}}}}, "noise.t2");

  // malformed JSON text
  std::string path = "vgqec_test_bad.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  REQUIRE_THROWS_AS(load_experiment_config(path), ConfigError);
  std::remove(path.c_str());
  REQUIRE_THROWS_AS(load_experiment_config("no_such_file.json"), ConfigError);
}

TEST_CASE("csv writer: schema, ordering and float format", "[experiments]") {
  std::vector<SweepRow> rows = {
      {0.2, "b", "sdp", 0.123456789012345, 0.5, 1, 10, 3},
      {0.1, "b", "sdp", 1.0 / 3.0, 0.5, 0, 0, 3},
      {0.1, "a", "standard", 0.9999999999, 0.5, 0, 0, 3},
  };
  std::string path = "vgqec_test_rows.csv";
  write_csv(path, rows);
  std::string text = slurp(path);
  std::remove(path.c_str());
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  REQUIRE(line == "param,code,recovery,channel_fidelity,avg_fidelity,restarts,evaluations,seed");
  std::getline(lines, line);
  REQUIRE(line.rfind("0.1,a,standard,0.9999999999,", 0) == 0);
  std::getline(lines, line);
  REQUIRE(line.rfind("0.1,b,sdp,0.333333333333,", 0) == 0);  // 12 significant digits
  std::getline(lines, line);
  REQUIRE(line.rfind("0.2,b,sdp,0.123456789012,", 0) == 0);
}

TEST_CASE("run_interpolation: tiny grid, endpoint behavior and determinism", "[experiments]") {
  ExperimentConfig cfg = tiny_interpolation();
  ExperimentReport report = run_experiment(cfg);
  REQUIRE(report.rows.size() == 6);  // 2 eta x 3 codes

  auto value = [&](const std::string& code, double param) {
    for (const auto& r : report.rows)
      if (r.code == code && r.param == param) return r.channel_fidelity;
    FAIL("row missing");
    return 0.0;
  };
  // the zero-seeded restart guarantees the trained code never loses to rep5X
  REQUIRE(value("vgqec_k5", 0.2) >= value("rep5X", 0.2) - 1e-6);
  REQUIRE(value("vgqec_k5", 0.8) >= value("rep5X", 0.8) - 1e-6);
  for (const auto& r : report.rows) {
    REQUIRE(r.channel_fidelity >= 0.0);
    REQUIRE(r.channel_fidelity <= 1.0 + 1e-9);
    // the tiny config runs the SDP at 1e-7, so the identity holds to that scale
    REQUIRE(std::abs(r.avg_fidelity - (2.0 * r.channel_fidelity + 1.0) / 3.0) < 1e-6);
  }

  // byte-identical CSV across repeated runs
  ExperimentReport again = run_experiment(cfg);
  write_csv("vgqec_run1.csv", report.rows);
  write_csv("vgqec_run2.csv", again.rows);
  REQUIRE(slurp("vgqec_run1.csv") == slurp("vgqec_run2.csv"));
  std::remove("vgqec_run1.csv");
  std::remove("vgqec_run2.csv");
}

TEST_CASE("run_amplitude_damping: tiny grid sanity", "[experiments]") {
  ExperimentConfig cfg = default_config(ExperimentKind::AmplitudeDamping);
  cfg.grid = {0.2};
  cfg.optimizer.restarts = 1;
  cfg.optimizer.max_evals = 200;
  cfg.optimizer.seed = 5;
  cfg.sdp.primal_tol = cfg.sdp.dual_tol = 1e-8;
  ExperimentReport report = run_experiment(cfg);
  REQUIRE(report.rows.size() == 8);

  auto row = [&](const std::string& code, const std::string& rec) -> const SweepRow& {
    for (const auto& r : report.rows)
      if (r.code == code && r.recovery == rec) return r;
    throw std::runtime_error("row missing " + code + "/" + rec);
  };
  // unprotected closed form (1+sqrt(1-g))^2/4
  REQUIRE(row("unprotected", "none").channel_fidelity ==
          Catch::Approx(std::pow(1.0 + std::sqrt(0.8), 2) / 4.0).margin(1e-10));
  // SDP recovery can only improve on the standard decoder
  REQUIRE(row("rep3Z", "sdp").channel_fidelity >=
          row("rep3Z", "standard").channel_fidelity - 1e-8);
  // the tailored code beats rep3Z under SDP recovery at gamma = 0.2
  REQUIRE(row("discovered3", "sdp").channel_fidelity >
          row("rep3Z", "sdp").channel_fidelity);
  // the zero-seeded trained restart never loses to the untrained code
  REQUIRE(row("vgqec3", "variational").channel_fidelity >=
          row("rep3Z", "standard").channel_fidelity - 1e-9);
  REQUIRE(row("vgqec5", "variational").channel_fidelity >=
          row("fiveonethree", "standard").channel_fidelity - 1e-9);
  REQUIRE(!report.summary.empty());
}

TEST_CASE("run_thermal: tiny grid with biconvex baseline", "[experiments]") {
  ExperimentConfig cfg = default_config(ExperimentKind::Thermal);
  cfg.grid = {2.5};
  cfg.optimizer.restarts = 1;
  cfg.optimizer.max_evals = 150;
  cfg.optimizer.seed = 8;
  cfg.biconvex = {2, 10};
  cfg.sdp.primal_tol = cfg.sdp.dual_tol = 1e-7;
  ExperimentReport report = run_experiment(cfg);
  REQUIRE(report.rows.size() == 5);
  REQUIRE(report.biconvex_traces.count(2.5) == 1);
  const auto& trace = report.biconvex_traces.at(2.5);
  REQUIRE(trace.size() == 20);
  for (size_t i = 1; i < trace.size(); ++i) REQUIRE(trace[i] >= trace[i - 1] - 1e-9);
}

TEST_CASE("run_verify_code and run_kl_check produce reports", "[experiments]") {
  ExperimentConfig cfg = default_config(ExperimentKind::VerifyCode);
  cfg.grid = {0.0, 0.2};
  cfg.sdp.primal_tol = cfg.sdp.dual_tol = 1e-8;
  ExperimentReport vr = run_experiment(cfg);
  REQUIRE(vr.rows.size() == 4);
  REQUIRE(vr.summary.size() >= 4);
  auto value = [&](const std::string& code, double param) {
    for (const auto& r : vr.rows)
      if (r.code == code && r.param == param) return r.channel_fidelity;
    throw std::runtime_error("row missing");
  };
  REQUIRE(value("discovered3", 0.0) == Catch::Approx(1.0).margin(1e-7));
  REQUIRE(value("discovered3", 0.2) > value("rep3Z", 0.2));

  ExperimentConfig kl = default_config(ExperimentKind::KlCheck);
  ExperimentReport kr = run_experiment(kl);
  REQUIRE(kr.rows.size() == 16);
  for (const auto& r : kr.rows) REQUIRE(r.channel_fidelity == Catch::Approx(1.0 / 16).margin(1e-9));
}

TEST_CASE("run_optimal_recovery: petz and standard modes", "[experiments]") {
  ExperimentConfig cfg = default_config(ExperimentKind::OptimalRecovery);
  cfg.grid = {0.1};
  cfg.codes = {{"rep3Z", {}}};
  cfg.sdp.primal_tol = cfg.sdp.dual_tol = 1e-8;

  cfg.recovery = "sdp";
  double f_sdp = run_experiment(cfg).rows[0].channel_fidelity;
  cfg.recovery = "petz";
  double f_petz = run_experiment(cfg).rows[0].channel_fidelity;
  cfg.recovery = "standard";
  double f_std = run_experiment(cfg).rows[0].channel_fidelity;
  REQUIRE(f_sdp >= f_petz - 1e-6);
  REQUIRE(f_sdp >= f_std - 1e-6);

  cfg.recovery = "junk";
  REQUIRE_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("svg writer emits one polyline per series", "[experiments]") {
  std::vector<SweepRow> rows = {{0.0, "a", "sdp", 0.9, 0.93, 0, 0, 1},
                                {1.0, "a", "sdp", 0.8, 0.87, 0, 0, 1},
                                {0.0, "b", "standard", 0.7, 0.8, 0, 0, 1},
                                {1.0, "b", "standard", 0.6, 0.73, 0, 0, 1}};
  std::string path = "vgqec_test_chart.svg";
  write_svg(path, rows);
  std::string text = slurp(path);
  std::remove(path.c_str());
  REQUIRE(text.find("<svg") != std::string::npos);
  size_t count = 0, pos = 0;
  while ((pos = text.find("<polyline", pos)) != std::string::npos) {
    ++count;
    pos += 9;
  }
  REQUIRE(count == 2);
}
