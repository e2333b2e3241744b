// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vgqec/vgqec.hpp"

namespace {

using namespace vgqec;

void print_report(const ExperimentReport& report, const std::string& csv_path) {
  for (const auto& line : report.summary) std::cout << "  " << line << "\n";
  std::cout << "  " << report.rows.size() << " rows -> " << csv_path << "\n";
}

int finish(const ExperimentConfig& cfg, const ExperimentReport& report) {
  write_csv(cfg.output, report.rows);
  if (cfg.svg) {
    std::string svg_path = cfg.output;
    auto dot = svg_path.rfind('.');
    svg_path = (dot == std::string::npos ? svg_path : svg_path.substr(0, dot)) + ".svg";
    write_svg(svg_path, report.rows);
    std::cout << "  chart -> " << svg_path << "\n";
  }
  print_report(report, cfg.output);
  if (!report.all_converged) {
    std::cerr << "warning: at least one solver did not reach its tolerance\n";
    return 2;
  }
  return 0;
}

std::vector<double> parse_alpha(const std::string& csv) {
  std::vector<double> out;
  if (csv.empty()) return out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vgqec: design lab for adjustable quantum error-correcting codes"};
  app.require_subcommand(1);

  // run <config.json>
  std::string config_path;
  bool svg_flag = false;
  auto* run = app.add_subcommand("run", "run an experiment sweep from a JSON config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_flag("--svg", svg_flag, "also write a minimal SVG chart");

  // kl-check
  std::string kl_code = "fiveonethree";
  std::string kl_alpha;
  std::string kl_output = "kl_check.csv";
  auto* kl = app.add_subcommand("kl-check", "Knill-Laflamme report for a code against weight-1 Paulis");
  kl->add_option("--code", kl_code, "code label (rep3Z, rep5X, fiveonethree, discovered3, vgqec_k5)");
  kl->add_option("--alpha", kl_alpha, "comma-separated angles for vgqec_k5");
  kl->add_option("-o,--output", kl_output, "CSV output path");

  // optimal-recovery
  std::string orc_code = "rep3Z";
  std::string orc_alpha;
  std::string orc_noise = "amplitude_damping";
  std::string orc_recovery = "sdp";
  std::vector<double> orc_grid = {0.0, 0.1, 0.2, 0.3};
  std::string orc_output = "optimal_recovery.csv";
  auto* orc = app.add_subcommand("optimal-recovery", "recovery fidelity sweep for a code and noise model");
  orc->add_option("--code", orc_code, "code label");
  orc->add_option("--alpha", orc_alpha, "comma-separated angles for vgqec_k5");
  orc->add_option("--noise", orc_noise, "noise model (amplitude_damping, thermal, interpolation, bit_flip, depolarizing)");
  orc->add_option("--recovery", orc_recovery, "recovery mode (sdp, petz, standard)");
  orc->add_option("--grid", orc_grid, "noise strengths")->expected(-1);
  orc->add_option("-o,--output", orc_output, "CSV output path");

  // verify-code
  std::string vc_output = "verify_code.csv";
  std::vector<double> vc_grid = {0.0, 0.1, 0.2, 0.3};
  auto* vc = app.add_subcommand("verify-code", "verify the discovered three-qubit code");
  vc->add_option("--grid", vc_grid, "damping strengths")->expected(-1);
  vc->add_option("-o,--output", vc_output, "CSV output path");

  // encode
  std::string en_code = "fiveonethree";
  std::string en_alpha;
  std::string en_output = "encoder.csv";
  auto* en = app.add_subcommand("encode", "write a code's encoding isometry");
  en->add_option("--code", en_code, "code label");
  en->add_option("--alpha", en_alpha, "comma-separated angles for vgqec_k5");
  en->add_option("-o,--output", en_output, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = load_experiment_config(config_path);
      if (svg_flag) cfg.svg = true;
      return finish(cfg, run_experiment(cfg));
    }
    if (kl->parsed()) {
      ExperimentConfig cfg = default_config(ExperimentKind::KlCheck);
      cfg.codes = {{kl_code, parse_alpha(kl_alpha)}};
      cfg.output = kl_output;
      return finish(cfg, run_kl_check(cfg));
    }
    if (orc->parsed()) {
      ExperimentConfig cfg = default_config(ExperimentKind::OptimalRecovery);
      cfg.codes = {{orc_code, parse_alpha(orc_alpha)}};
      cfg.noise.model = orc_noise;
      cfg.recovery = orc_recovery;
      cfg.grid = orc_grid;
      cfg.output = orc_output;
      cfg.check();
      return finish(cfg, run_optimal_recovery(cfg));
    }
    if (vc->parsed()) {
      ExperimentConfig cfg = default_config(ExperimentKind::VerifyCode);
      cfg.grid = vc_grid;
      cfg.output = vc_output;
      cfg.check();
      return finish(cfg, run_verify_code(cfg));
    }
    if (en->parsed()) {
      Encoder e = make_encoder({en_code, parse_alpha(en_alpha)});
      std::ofstream out(en_output, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open output file '" + en_output + "'");
      out << "row,col,re,im\n";
      for (Index c = 0; c < e.isometry.cols(); ++c)
        for (Index r = 0; r < e.isometry.rows(); ++r)
          if (std::abs(e.isometry(r, c)) > 1e-14)
            out << r << ',' << c << ',' << format_double(e.isometry(r, c).real()) << ','
                << format_double(e.isometry(r, c).imag()) << '\n';
      std::cout << "  " << e.label << ": " << (Index{1} << e.k) << " codewords on " << e.n
                << " qubits -> " << en_output << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
