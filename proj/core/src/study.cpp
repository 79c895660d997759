// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "stdg/analysis.hpp"
#include "stdg/postprocess.hpp"

namespace stdg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int mesh_cells(const StudyConfig& c, int level) {
  // Example 2 levels count cells per unit length on (-1,1)^2, so the grid is
  // 2N x 2N and h = 1/N equals the slab size.  Example 1 uses N cells.
  return c.example == 2 ? 2 * level : level;
}

void validate(const StudyConfig& c) {
  if (c.example != 1 && c.example != 2)
    throw std::invalid_argument("study: example must be 1 or 2");
  if (c.k < 1) throw std::invalid_argument("study: k must be >= 1");
  if (c.q < 0) throw std::invalid_argument("study: q must be >= 0");
  if (c.levels.empty()) throw std::invalid_argument("study: no levels given");
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (c.levels[i] < 1)
      throw std::invalid_argument("study: levels must be positive");
    if (i > 0 && c.levels[i] <= c.levels[i - 1])
      throw std::invalid_argument("study: levels must be strictly ascending");
  }
  if (c.rhos.empty()) throw std::invalid_argument("study: no rho given");
  if (c.norms.empty()) throw std::invalid_argument("study: no norms given");
  for (const auto& n : c.norms)
    if (n != "l2" && n != "linf")
      throw std::invalid_argument("study: unknown norm selection '" + n + "'");
  if (c.time_pts < 1 || c.sup_samples < 1 || c.workers < 1)
    throw std::invalid_argument(
        "study: time_pts, sup_samples and workers must be >= 1");
}

bool wants(const StudyConfig& c, const char* norm) {
  return std::find(c.norms.begin(), c.norms.end(), norm) != c.norms.end();
}

// The reconstruction-vs-original column differs between the norm families:
// in L2 it is measured in the rho-weighted norm (its natural norm), in the
// sup family as the plain supremum, hence u_post_w vs u_post_sup.
std::vector<std::string> column_names(const StudyConfig& c) {
  std::vector<std::string> l2, linf;
  if (c.variant == Variant::weighted && !c.postprocess) {
    for (std::size_t i = 0; i < c.rhos.size(); ++i)
      l2.push_back("u_rho" + std::to_string(i + 1));
    if (c.rhos.size() >= 2) l2.push_back("diff");
    for (const auto& b : l2) linf.push_back(b + "_sup");
  } else if (c.variant == Variant::weighted) {
    l2 = {"u_rho1", "u_post_w"};
    linf = {"u_rho1_sup", "u_post_sup"};
  } else if (!c.postprocess) {
    l2 = {"v", "u_lift", "cmp"};
    linf = {"v_sup", "u_lift_sup", "cmp_sup"};
  } else {
    l2 = {"v", "v_post", "u_lift_post", "u_post_w"};
    linf = {"v_sup", "v_post_sup", "u_lift_post_sup", "u_post_sup"};
  }
  std::vector<std::string> out;
  if (wants(c, "l2")) out = l2;
  if (wants(c, "linf")) out.insert(out.end(), linf.begin(), linf.end());
  return out;
}

// All error columns for one level, in the order of column_names.
std::vector<double> compute_level(const StudyConfig& c, int level) {
  const DiscreteProblem prob = make_example(c.example, mesh_cells(c, level), c.k);
  const TimeMesh tm = TimeMesh::uniform(prob.t_end(), level);
  const double rho = c.rhos.front();
  const auto sq_u = prob.error_sq(0.0);
  const auto sq_gram = gram_sq(prob.gram());
  const int pts = c.time_pts;
  const int sam = c.sup_samples;

  std::vector<double> l2, linf;
  const bool want_l2 = wants(c, "l2"), want_linf = wants(c, "linf");

  if (c.variant == Variant::weighted && !c.postprocess) {
    std::vector<DiscreteSolution> w;
    w.reserve(c.rhos.size());
    for (const double r : c.rhos)
      w.push_back(march(prob.evo(), tm, c.q, r, Variant::weighted));
    TrajSpec diff{&tm,
                  [&](double t, bool fl) {
                    return Eigen::VectorXd(w[0].eval(t, fl) - w[1].eval(t, fl));
                  },
                  0.0};
    if (want_l2) {
      for (std::size_t i = 0; i < w.size(); ++i)
        l2.push_back(weighted_l2_error(spec_of(w[i]), sq_u, c.rhos[i], pts));
      if (w.size() >= 2)
        l2.push_back(weighted_l2_error(diff, sq_gram, c.rhos[1], pts));
    }
    if (want_linf) {
      for (std::size_t i = 0; i < w.size(); ++i)
        linf.push_back(sup_m0_error(spec_of(w[i]), sq_u, sam));
      if (w.size() >= 2) linf.push_back(sup_m0_error(diff, sq_gram, sam));
    }
  } else if (c.variant == Variant::weighted) {
    auto w = std::make_shared<DiscreteSolution>(
        march(prob.evo(), tm, c.q, rho, Variant::weighted));
    const auto pp = postprocess_weighted(w);
    if (want_l2) {
      l2.push_back(weighted_l2_error(spec_of(*w), sq_u, rho, pts));
      l2.push_back(weighted_l2_error(spec_of(pp), sq_u, rho, pts));
    }
    if (want_linf) {
      linf.push_back(sup_m0_error(spec_of(*w), sq_u, sam));
      linf.push_back(sup_m0_error(spec_of(pp), sq_u, sam));
    }
  } else {
    auto ts = std::make_shared<DiscreteSolution>(
        march(prob.evo(), tm, c.q, rho, Variant::transformed));
    const auto sq_v = prob.error_sq(rho);
    const LiftedSolution lift = lift_exponential(ts);
    if (!c.postprocess) {
      const DiscreteSolution w =
          march(prob.evo(), tm, c.q, rho, Variant::weighted);
      TrajSpec cmp{&tm,
                   [&](double t, bool fl) {
                     return Eigen::VectorXd(lift.eval(t, fl) - w.eval(t, fl));
                   },
                   0.0};
      if (want_l2) {
        l2.push_back(weighted_l2_error(spec_of(*ts), sq_v, 0.0, pts));
        l2.push_back(weighted_l2_error(spec_of(lift), sq_u, 0.0, pts));
        l2.push_back(weighted_l2_error(cmp, sq_gram, 0.0, pts));
      }
      if (want_linf) {
        linf.push_back(sup_m0_error(spec_of(*ts), sq_v, sam));
        linf.push_back(sup_m0_error(spec_of(lift), sq_u, sam));
        linf.push_back(sup_m0_error(cmp, sq_gram, sam));
      }
    } else {
      const auto pp = postprocess(ts);
      TrajSpec pp_lifted = spec_of(pp);
      pp_lifted.lift_rho = rho;
      auto w = std::make_shared<DiscreteSolution>(
          march(prob.evo(), tm, c.q, rho, Variant::weighted));
      const auto ppw = postprocess_weighted(w);
      if (want_l2) {
        l2.push_back(weighted_l2_error(spec_of(*ts), sq_v, 0.0, pts));
        l2.push_back(weighted_l2_error(spec_of(pp), sq_v, 0.0, pts));
        l2.push_back(weighted_l2_error(pp_lifted, sq_u, 0.0, pts));
        l2.push_back(weighted_l2_error(spec_of(ppw), sq_u, rho, pts));
      }
      if (want_linf) {
        linf.push_back(sup_m0_error(spec_of(*ts), sq_v, sam));
        linf.push_back(sup_m0_error(spec_of(pp), sq_v, sam));
        linf.push_back(sup_m0_error(pp_lifted, sq_u, sam));
        linf.push_back(sup_m0_error(spec_of(ppw), sq_u, sam));
      }
    }
  }

  std::vector<double> out = std::move(l2);
  out.insert(out.end(), linf.begin(), linf.end());
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt("%g", v[i]);
  return s;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

void echo_config(std::ostringstream& os, const StudyConfig& c,
                 const char* kind) {
  os << "# stdg " << kind << "\n";
  os << "# example = " << c.example << "\n";
  os << "# variant = "
     << (c.variant == Variant::weighted ? "weighted" : "transformed") << "\n";
  os << "# rho = " << join_doubles(c.rhos) << "\n";
  os << "# k = " << c.k << "\n";
  os << "# q = " << c.q << "\n";
  os << "# levels = " << join_ints(c.levels) << "\n";
  os << "# postprocess = " << (c.postprocess ? 1 : 0) << "\n";
  os << "# norms = " << join_strings(c.norms) << "\n";
  os << "# time_pts = " << c.time_pts << "\n";
  os << "# sup_samples = " << c.sup_samples << "\n";
  os << "# seed = " << c.seed << "\n";
  os << "# mesh = "
     << (c.example == 2 ? "level N -> 2N x 2N cells, M = N slabs"
                        : "level N -> N cells, M = N slabs")
     << "\n";
}

void write_out(const std::string& path, const std::string& bytes) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("study: cannot open output file " + path);
  f << bytes;
  if (!f) throw std::runtime_error("study: short write to " + path);
}

}  // namespace

ConvergenceReport run_study(const StudyConfig& config) {
  validate(config);
  const auto cols = column_names(config);

  ConvergenceReport rep;
  rep.columns = cols;
  rep.rows.resize(config.levels.size());

  // Levels run in slots of `workers`; results land indexed by level so the
  // report and CSV bytes do not depend on completion order.
  for (std::size_t base = 0; base < config.levels.size();
       base += static_cast<std::size_t>(config.workers)) {
    const std::size_t end = std::min(
        config.levels.size(), base + static_cast<std::size_t>(config.workers));
    std::vector<std::future<std::vector<double>>> slot;
    for (std::size_t i = base; i < end; ++i)
      slot.push_back(std::async(
          config.workers > 1 ? std::launch::async : std::launch::deferred,
          compute_level, std::cref(config), config.levels[i]));
    for (std::size_t i = base; i < end; ++i) {
      StudyRow& row = rep.rows[i];
      row.level = config.levels[i];
      try {
        row.errs = slot[i - base].get();
        row.ok = true;
      } catch (const std::exception& e) {
        row.failure = e.what();
      }
    }
  }

  // Rates against the previous successful level; general level ratios.
  rep.rates.assign(rep.rows.size(), std::vector<double>(cols.size(), kNaN));
  std::ptrdiff_t prev = -1;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (!rep.rows[i].ok) continue;
    if (prev >= 0) {
      const auto& a = rep.rows[static_cast<std::size_t>(prev)];
      const auto& b = rep.rows[i];
      const double denominator =
          std::log(static_cast<double>(b.level) / a.level);
      for (std::size_t j = 0; j < cols.size(); ++j)
        if (a.errs[j] > 0.0 && b.errs[j] > 0.0)
          rep.rates[i][j] = std::log(a.errs[j] / b.errs[j]) / denominator;
    }
    prev = static_cast<std::ptrdiff_t>(i);
  }

  std::ostringstream os;
  echo_config(os, config, "convergence study");
  if (config.seed != 0) {
    const DiscreteProblem probe = make_example(
        config.example, mesh_cells(config, config.levels.front()), config.k);
    os << "# fd_residual = "
       << fmt("%.3e", probe.fd_residual(64, config.seed)) << "\n";
  }
  os << "k,q,N";
  for (const auto& c : cols) os << ",err_" << c << ",rate_" << c;
  os << "\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    if (!row.ok) {
      os << "# level " << row.level << " failed: " << row.failure << "\n";
      continue;
    }
    os << config.k << "," << config.q << "," << row.level;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      os << "," << fmt("%.6e", row.errs[j]) << ",";
      if (std::isfinite(rep.rates[i][j])) os << fmt("%.3f", rep.rates[i][j]);
    }
    os << "\n";
  }
  rep.csv = os.str();
  write_out(config.out, rep.csv);
  return rep;
}

EnergyReport run_energy_audit(const StudyConfig& config) {
  validate(config);
  const double rho = config.rhos.front();

  EnergyReport rep;
  rep.levels.resize(config.levels.size());
  for (std::size_t li = 0; li < config.levels.size(); ++li) {
    EnergyLevel& lv = rep.levels[li];
    lv.level = config.levels[li];
    try {
      const DiscreteProblem prob =
          make_example(config.example, mesh_cells(config, lv.level), config.k);
      const TimeMesh tm = TimeMesh::uniform(prob.t_end(), lv.level);
      const DiscreteSolution sol =
          march(prob.evo(), tm, config.q, rho, config.variant);
      lv.points.resize(static_cast<std::size_t>(tm.n_slabs()));
      for (int i = 1; i <= tm.n_slabs(); ++i) {
        const EnergyAudit a = energy_audit(sol, prob.evo(), i);
        EnergyPoint& p = lv.points[static_cast<std::size_t>(i - 1)];
        p.index = i;
        p.t = tm.nodes[static_cast<std::size_t>(i)];
        p.lhs = a.lhs();
        p.rhs = a.rhs();
        p.rel_gap = std::abs(a.gap()) / a.scale();
        lv.max_rel_gap = std::max(lv.max_rel_gap, p.rel_gap);
      }
      const double jump_rho = config.variant == Variant::weighted ? rho : 0.0;
      lv.jump_sum = jump_sum(sol, prob.m0(), jump_rho);
      lv.ok = true;
    } catch (const std::exception& e) {
      lv.failure = e.what();
    }
  }

  std::ptrdiff_t prev = -1;
  for (std::size_t i = 0; i < rep.levels.size(); ++i) {
    if (!rep.levels[i].ok) continue;
    if (prev >= 0) {
      const auto& a = rep.levels[static_cast<std::size_t>(prev)];
      const auto& b = rep.levels[i];
      if (a.jump_sum > 0.0 && b.jump_sum > 0.0)
        rep.jump_eoc.push_back(std::log(a.jump_sum / b.jump_sum) /
                               std::log(static_cast<double>(b.level) /
                                        a.level));
    }
    prev = static_cast<std::ptrdiff_t>(i);
  }

  std::ostringstream os;
  echo_config(os, config, "energy audit");
  os << "k,q,N,i,t,lhs,rhs,rel_gap\n";
  for (const auto& lv : rep.levels) {
    if (!lv.ok) {
      os << "# level " << lv.level << " failed: " << lv.failure << "\n";
      continue;
    }
    for (const auto& p : lv.points)
      os << config.k << "," << config.q << "," << lv.level << "," << p.index
         << "," << fmt("%.10g", p.t) << "," << fmt("%.12e", p.lhs) << ","
         << fmt("%.12e", p.rhs) << "," << fmt("%.3e", p.rel_gap) << "\n";
    os << "# level " << lv.level
       << ": max_rel_gap = " << fmt("%.3e", lv.max_rel_gap)
       << ", jump_sum = " << fmt("%.6e", lv.jump_sum) << "\n";
  }
  if (!rep.jump_eoc.empty()) {
    os << "# jump_sum_eoc =";
    for (const double r : rep.jump_eoc) os << " " << fmt("%.3f", r);
    os << "\n";
  }
  rep.csv = os.str();
  write_out(config.out, rep.csv);
  return rep;
}

}  // namespace stdg
