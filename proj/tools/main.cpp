// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

// Command line front end: convergence studies, quadrature-rule inspection,
// energy audits, and solution checkpoint dumps.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "stdg/analysis.hpp"
#include "stdg/evolution.hpp"
#include "stdg/postprocess.hpp"
#include "stdg/problems.hpp"
#include "stdg/quadrature.hpp"
#include "stdg/study.hpp"

namespace {

int run_quadrature(int q, double sigma, bool json) {
  const auto rule = stdg::build_weighted_radau(q, sigma);
  const auto mu = stdg::exp_moments(sigma, 2 * q);
  if (json) {
    std::printf("{\n  \"q\": %d,\n  \"sigma\": %.17g,\n", q, sigma);
    std::printf("  \"nodes\": [");
    for (int i = 0; i <= q; ++i)
      std::printf("%s%.17g", i ? ", " : "", rule->nodes[i]);
    std::printf("],\n  \"weights\": [");
    for (int i = 0; i <= q; ++i)
      std::printf("%s%.17g", i ? ", " : "", rule->weights[i]);
    std::printf("],\n  \"moment_residuals\": [");
    for (int k = 0; k <= 2 * q; ++k) {
      double s = 0.0;
      for (int i = 0; i <= q; ++i)
        s += rule->weights[i] * std::pow(rule->nodes[i], k);
      std::printf("%s%.3e", k ? ", " : "", s - mu[k]);
    }
    std::printf("]\n}\n");
  } else {
    std::printf("# weighted Radau rule, q = %d, sigma = %.17g\n", q, sigma);
    std::printf("i,node,weight\n");
    for (int i = 0; i <= q; ++i)
      std::printf("%d,%.17g,%.17g\n", i, rule->nodes[i], rule->weights[i]);
    std::printf("# moment residuals (k, quadrature - exact)\n");
    for (int k = 0; k <= 2 * q; ++k) {
      double s = 0.0;
      for (int i = 0; i <= q; ++i)
        s += rule->weights[i] * std::pow(rule->nodes[i], k);
      std::printf("# %d,%.3e\n", k, s - mu[k]);
    }
  }
  return 0;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: not a boolean: " + v);
}

// Shared study/energy/dump options mapped straight onto StudyConfig.
struct CommonOpts {
  stdg::StudyConfig cfg;
  std::string variant = "weighted";
  int q = -1;  // -1: preset from k and the postprocess flag
  std::string config_path;
  CLI::App* cmd = nullptr;

  void attach(CLI::App* c, bool with_norms) {
    cmd = c;
    cmd->add_option("--example", cfg.example, "built-in example id (1 or 2)")
        ->check(CLI::Range(1, 2));
    cmd->add_option("--variant", variant,
                    "slab scheme: weighted or transformed")
        ->check(CLI::IsMember({"weighted", "transformed"}));
    cmd->add_option("--rho", cfg.rhos,
                    "weight rate(s); repeat or comma separate")
        ->delimiter(',');
    cmd->add_option("--k", cfg.k, "spatial polynomial degree");
    cmd->add_option("--q", q,
                    "temporal degree; default k-1, or max(1, k-2) with "
                    "--postprocess");
    cmd->add_option("--levels", cfg.levels,
                    "levels N (N slabs; example 2 meshes are 2N x 2N)")
        ->delimiter(',');
    cmd->add_flag("--postprocess", cfg.postprocess,
                  "reconstruct the continuous degree-(q+1) solution");
    if (with_norms)
      cmd->add_option("--norms", cfg.norms, "error families: l2 and/or linf")
          ->delimiter(',');
    cmd->add_option("--out", cfg.out, "write CSV here (default: stdout)");
    cmd->add_option("--time-samples", cfg.sup_samples,
                    "per-slab samples for sup norms and dumps");
    cmd->add_option("--workers", cfg.workers, "parallel level slots");
    cmd->add_option("--seed", cfg.seed,
                    "nonzero: spot-check the hard-coded right-hand sides "
                    "with finite differences at this seed");
    cmd->add_option("--config", config_path,
                    "read key = value lines from this file; command line "
                    "flags take precedence");
  }

  // Applies the config file (keys are the flag names without dashes; '#'
  // starts a comment) for every option not set on the command line, then
  // resolves derived defaults.
  stdg::StudyConfig finalize() {
    if (!config_path.empty()) apply_config();
    cfg.variant = variant == "transformed" ? stdg::Variant::transformed
                                           : stdg::Variant::weighted;
    cfg.q = q >= 0 ? q
                   : (cfg.postprocess ? std::max(1, cfg.k - 2) : cfg.k - 1);
    return cfg;
  }

 private:
  bool overridden(const std::string& flag) const {
    const auto* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  }

  void apply_config() {
    std::ifstream f(config_path);
    if (!f)
      throw std::runtime_error("cannot open config file " + config_path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (overridden("--" + key)) continue;
      if (key == "example") {
        cfg.example = std::stoi(val);
      } else if (key == "variant") {
        if (val != "weighted" && val != "transformed")
          throw std::invalid_argument("config: unknown variant " + val);
        variant = val;
      } else if (key == "rho") {
        cfg.rhos.clear();
        for (const auto& p : split(val, ',')) cfg.rhos.push_back(std::stod(p));
      } else if (key == "k") {
        cfg.k = std::stoi(val);
      } else if (key == "q") {
        q = std::stoi(val);
      } else if (key == "levels") {
        cfg.levels.clear();
        for (const auto& p : split(val, ','))
          cfg.levels.push_back(std::stoi(p));
      } else if (key == "postprocess") {
        cfg.postprocess = parse_bool(val);
      } else if (key == "norms") {
        if (cmd->get_option_no_throw("--norms") == nullptr)
          throw std::invalid_argument(
              "config: norms does not apply to this subcommand");
        cfg.norms = split(val, ',');
      } else if (key == "out") {
        cfg.out = val;
      } else if (key == "time-samples") {
        cfg.sup_samples = std::stoi(val);
      } else if (key == "workers") {
        cfg.workers = std::stoi(val);
      } else if (key == "seed") {
        cfg.seed = static_cast<unsigned>(std::stoul(val));
      } else {
        throw std::invalid_argument("config: unknown key " + key);
      }
    }
  }
};

int emit(const std::string& path, const std::string& bytes) {
  if (path.empty()) {
    std::fputs(bytes.c_str(), stdout);
  }
  // Nonempty paths were already written by the library call.
  return 0;
}

int run_dump(stdg::StudyConfig cfg) {
  if (cfg.levels.size() != 1)
    throw std::invalid_argument("dump-solution: exactly one level expected");
  const int level = cfg.levels.front();
  const auto prob = stdg::make_example(
      cfg.example, cfg.example == 2 ? 2 * level : level, cfg.k);
  const stdg::TimeMesh tm = stdg::TimeMesh::uniform(prob.t_end(), level);
  const double rho = cfg.rhos.front();
  auto sol = std::make_shared<stdg::DiscreteSolution>(
      stdg::march(prob.evo(), tm, cfg.q, rho, cfg.variant));

  std::function<Eigen::VectorXd(double)> at;
  if (cfg.postprocess && cfg.variant == stdg::Variant::transformed) {
    auto pp = std::make_shared<stdg::PostprocessedSolution>(
        stdg::postprocess(sol));
    at = [pp](double t) { return pp->eval(t); };
  } else if (cfg.postprocess) {
    auto pp = std::make_shared<stdg::PostprocessedSolution>(
        stdg::postprocess_weighted(sol));
    at = [pp](double t) { return pp->eval(t); };
  } else {
    at = [sol](double t) { return sol->eval(t, true); };
  }

  std::string bytes;
  bytes += "# stdg solution dump\n";
  bytes += "# example = " + std::to_string(cfg.example) + "\n";
  bytes += "# variant = ";
  bytes += cfg.variant == stdg::Variant::weighted ? "weighted" : "transformed";
  bytes += "\n# rho = ";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", rho);
  bytes += buf;
  bytes += "\n# k = " + std::to_string(cfg.k) +
           "\n# q = " + std::to_string(cfg.q) +
           "\n# level = " + std::to_string(level) +
           "\n# postprocess = " + std::to_string(cfg.postprocess ? 1 : 0) +
           "\n# rows: sample time, coefficient index, coefficient value\n";
  bytes += "t,i,value\n";
  const int samples = std::max(2, cfg.sup_samples);
  for (int s = 0; s < samples; ++s) {
    const double t = prob.t_end() * s / (samples - 1);
    const Eigen::VectorXd v = at(t);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.10g,%lld,%.17g\n", t,
                    static_cast<long long>(i), v[i]);
      bytes += buf;
    }
  }
  if (cfg.out.empty()) return emit("", bytes);
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("dump-solution: cannot open " + cfg.out);
  f << bytes;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space-time discontinuous Galerkin solver for linear "
               "evolutionary systems"};
  app.require_subcommand(1);

  auto* quad = app.add_subcommand(
      "quadrature", "print a weighted Radau rule and its moment residuals");
  int q = 1;
  double sigma = 0.0;
  bool as_json = false, as_csv = false;
  quad->add_option("--q", q, "temporal degree (q+1 nodes)")->required();
  quad->add_option("--sigma", sigma, "weight exponent sigma = rho * tau");
  quad->add_flag("--json", as_json, "emit JSON");
  quad->add_flag("--csv", as_csv, "emit CSV (default)");

  CommonOpts study_opts;
  auto* study = app.add_subcommand(
      "study", "convergence sweep over mesh levels; CSV with error and "
               "rate columns");
  study_opts.attach(study, /*with_norms=*/true);

  CommonOpts energy_opts;
  auto* energy = app.add_subcommand(
      "energy", "discrete energy identity audit at every mesh point");
  energy_opts.attach(energy, /*with_norms=*/false);

  CommonOpts dump_opts;
  auto* dump = app.add_subcommand(
      "dump-solution", "sample the marched (or reconstructed) coefficient "
                       "trajectory at equispaced times");
  dump_opts.attach(dump, /*with_norms=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (quad->parsed()) return run_quadrature(q, sigma, as_json && !as_csv);
    if (study->parsed()) {
      const auto rep = stdg::run_study(study_opts.finalize());
      return emit(study_opts.cfg.out, rep.csv);
    }
    if (energy->parsed()) {
      const auto rep = stdg::run_energy_audit(energy_opts.finalize());
      return emit(energy_opts.cfg.out, rep.csv);
    }
    if (dump->parsed()) return run_dump(dump_opts.finalize());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
