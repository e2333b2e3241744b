// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "vgqec/ansatz.hpp"
#include "vgqec/channels.hpp"
#include "vgqec/codes.hpp"
#include "vgqec/qcore.hpp"
#include "vgqec/recovery.hpp"
#include "vgqec/util.hpp"

namespace vgqec {

enum class OptimizerKind { NelderMead, Spsa, LbfgsFd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::NelderMead;
  int restarts = 1;
  long max_evals = 2000;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;

  void check() const {
    if (restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
    if (max_evals < 1) throw std::invalid_argument("OptimizerConfig: max_evals must be >= 1");
  }
};

using Objective = std::function<double(std::span<const double>)>;

struct OptResult {
  std::vector<double> x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;  // false when the eval budget ran out first
};

// ---------------------------------------------------------------------------
// Classical optimizers (all maximize f by minimizing -f)

/// Nelder-Mead simplex with the standard coefficients (reflect 1, expand 2,
/// contract 0.5, shrink 0.5) and initial simplex step 0.25 per coordinate.
inline OptResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const OptimizerConfig& cfg) {
  cfg.check();
  const size_t dim = x0.size();
  long evals = 0;
  auto g = [&](const std::vector<double>& x) {
    ++evals;
    return -f(std::span<const double>(x));
  };

  std::vector<std::vector<double>> pts(dim + 1, x0);
  std::vector<double> vals(dim + 1);
  for (size_t i = 0; i < dim; ++i) pts[i + 1][i] += 0.25;
  for (size_t i = 0; i <= dim; ++i) vals[i] = g(pts[i]);

  auto simplex_diameter = [&] {
    double d2 = 0.0;
    for (size_t i = 1; i <= dim; ++i)
      for (size_t d = 0; d < dim; ++d) {
        double dd = pts[i][d] - pts[0][d];
        d2 = std::max(d2, dd * dd);
      }
    return std::sqrt(d2);
  };

  std::vector<size_t> order(dim + 1);
  bool converged = false;
  const double x_tol = std::max(1e-10, std::sqrt(cfg.tolerance));
  while (evals < cfg.max_evals) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    if (vals[order[dim]] - vals[order[0]] < cfg.tolerance) {
      // A flat value spread across a wide simplex (vertices straddling the
      // optimum) is not convergence; shrink and keep going.
      if (simplex_diameter() < x_tol) {
        converged = true;
        break;
      }
      for (size_t i = 0; i <= dim; ++i) {
        if (i == order[0]) continue;
        for (size_t d = 0; d < dim; ++d)
          pts[i][d] = pts[order[0]][d] + 0.5 * (pts[i][d] - pts[order[0]][d]);
        vals[i] = g(pts[i]);
        if (evals >= cfg.max_evals) break;
      }
      continue;
    }
    std::vector<double> centroid(dim, 0.0);
    for (size_t i = 0; i < dim; ++i)
      for (size_t d = 0; d < dim; ++d) centroid[d] += pts[order[i]][d] / static_cast<double>(dim);

    const size_t worst = order[dim];
    auto blend = [&](double t) {
      std::vector<double> p(dim);
      for (size_t d = 0; d < dim; ++d) p[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
      return p;
    };

    std::vector<double> refl = blend(-1.0);
    double f_refl = g(refl);
    if (f_refl < vals[order[0]]) {
      std::vector<double> expd = blend(-2.0);
      double f_expd = g(expd);
      if (f_expd < f_refl) {
        pts[worst] = std::move(expd);
        vals[worst] = f_expd;
      } else {
        pts[worst] = std::move(refl);
        vals[worst] = f_refl;
      }
    } else if (f_refl < vals[order[dim - 1]]) {
      pts[worst] = std::move(refl);
      vals[worst] = f_refl;
    } else {
      bool outside = f_refl < vals[worst];
      std::vector<double> ctr = blend(outside ? -0.5 : 0.5);
      double f_ctr = g(ctr);
      if (f_ctr < std::min(f_refl, vals[worst])) {
        pts[worst] = std::move(ctr);
        vals[worst] = f_ctr;
      } else {
        // shrink toward the best vertex
        for (size_t i = 1; i <= dim; ++i) {
          size_t v = order[i];
          for (size_t d = 0; d < dim; ++d)
            pts[v][d] = pts[order[0]][d] + 0.5 * (pts[v][d] - pts[order[0]][d]);
          vals[v] = g(pts[v]);
          if (evals >= cfg.max_evals) break;
        }
      }
    }
  }

  size_t best = 0;
  for (size_t i = 1; i <= dim; ++i)
    if (vals[i] < vals[best]) best = i;
  return OptResult{pts[best], -vals[best], evals, converged};
}

/// SPSA with gains a_k = a/(k+A)^0.602 and c_k = c/k^0.101,
/// a = 0.2, c = 0.1, A = 10% of the eval budget.
inline OptResult spsa(const Objective& f, std::vector<double> x0, const OptimizerConfig& cfg) {
  cfg.check();
  const size_t dim = x0.size();
  Rng rng(cfg.seed);
  long evals = 0;
  auto g = [&](const std::vector<double>& x) {
    ++evals;
    return -f(std::span<const double>(x));
  };

  const double a = 0.2, c = 0.1;
  const double big_a = 0.1 * static_cast<double>(cfg.max_evals);
  std::vector<double> x = x0, best_x = x0;
  double best_val = g(x0);
  std::vector<double> delta(dim), probe(dim);
  int small_steps = 0;
  bool converged = false;
  for (long k = 1; evals + 2 <= cfg.max_evals; ++k) {
    double ck = c / std::pow(static_cast<double>(k), 0.101);
    double ak = a / std::pow(static_cast<double>(k) + big_a, 0.602);
    for (size_t d = 0; d < dim; ++d) delta[d] = (rng.next_u64() & 1) ? 1.0 : -1.0;
    for (size_t d = 0; d < dim; ++d) probe[d] = x[d] + ck * delta[d];
    double fp = g(probe);
    if (fp < best_val) {
      best_val = fp;
      best_x = probe;
    }
    for (size_t d = 0; d < dim; ++d) probe[d] = x[d] - ck * delta[d];
    double fm = g(probe);
    if (fm < best_val) {
      best_val = fm;
      best_x = probe;
    }
    double step_norm = 0.0;
    for (size_t d = 0; d < dim; ++d) {
      double ghat = (fp - fm) / (2.0 * ck * delta[d]);
      x[d] -= ak * ghat;
      step_norm += (ak * ghat) * (ak * ghat);
    }
    small_steps = std::sqrt(step_norm) < cfg.tolerance ? small_steps + 1 : 0;
    if (small_steps >= 10) {
      converged = true;
      break;
    }
  }
  if (evals < cfg.max_evals) {
    double fx = g(x);
    if (fx < best_val) {
      best_val = fx;
      best_x = x;
    }
  }
  return OptResult{best_x, -best_val, evals, converged};
}

/// L-BFGS (memory 10) on central finite differences, step 1e-6, with Armijo
/// backtracking.
inline OptResult lbfgs_fd(const Objective& f, std::vector<double> x0, const OptimizerConfig& cfg) {
  cfg.check();
  const size_t dim = x0.size();
  const double fd_step = 1e-6;
  const size_t memory = 10;
  long evals = 0;
  auto g = [&](const std::vector<double>& x) {
    ++evals;
    return -f(std::span<const double>(x));
  };
  auto grad = [&](const std::vector<double>& x, std::vector<double>& out) {
    std::vector<double> p = x;
    for (size_t d = 0; d < dim; ++d) {
      p[d] = x[d] + fd_step;
      double fp = g(p);
      p[d] = x[d] - fd_step;
      double fm = g(p);
      p[d] = x[d];
      out[d] = (fp - fm) / (2.0 * fd_step);
    }
  };

  std::vector<double> x = x0, gr(dim), gr_new(dim), dir(dim), x_new(dim);
  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  double fx = g(x);
  bool converged = false;

  while (evals + static_cast<long>(2 * dim) <= cfg.max_evals) {
    grad(x, gr);
    double gnorm = 0.0;
    for (double v : gr) gnorm = std::max(gnorm, std::abs(v));
    if (gnorm < std::max(cfg.tolerance, 1e-9)) {
      converged = true;
      break;
    }

    // two-loop recursion
    dir = gr;
    std::vector<double> alpha_hist(s_hist.size());
    for (size_t i = s_hist.size(); i-- > 0;) {
      double al = rho_hist[i] * std::inner_product(s_hist[i].begin(), s_hist[i].end(), dir.begin(), 0.0);
      alpha_hist[i] = al;
      for (size_t d = 0; d < dim; ++d) dir[d] -= al * y_hist[i][d];
    }
    if (!s_hist.empty()) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
      double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
      if (yy > 0) {
        double scale = sy / yy;
        for (auto& v : dir) v *= scale;
      }
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      double beta = rho_hist[i] * std::inner_product(y_hist[i].begin(), y_hist[i].end(), dir.begin(), 0.0);
      for (size_t d = 0; d < dim; ++d) dir[d] += s_hist[i][d] * (alpha_hist[i] - beta);
    }
    for (auto& v : dir) v = -v;

    double slope = std::inner_product(gr.begin(), gr.end(), dir.begin(), 0.0);
    if (slope >= 0) {  // not a descent direction; fall back to steepest descent
      for (size_t d = 0; d < dim; ++d) dir[d] = -gr[d];
      slope = -std::inner_product(gr.begin(), gr.end(), gr.begin(), 0.0);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = 1.0;
    double fx_new = fx;
    bool accepted = false;
    for (int bt = 0; bt < 30 && evals < cfg.max_evals; ++bt) {
      for (size_t d = 0; d < dim; ++d) x_new[d] = x[d] + step * dir[d];
      fx_new = g(x_new);
      if (fx_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no further progress within FD resolution
      break;
    }

    grad(x_new, gr_new);
    std::vector<double> s(dim), y(dim);
    for (size_t d = 0; d < dim; ++d) {
      s[d] = x_new[d] - x[d];
      y[d] = gr_new[d] - gr[d];
    }
    double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
    if (sy > 1e-12) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > memory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    x.swap(x_new);
    gr.swap(gr_new);
    double f_drop = fx - fx_new;
    fx = fx_new;
    if (f_drop < cfg.tolerance * (std::abs(fx) + 1e-12)) {
      converged = true;
      break;
    }
  }
  return OptResult{x, -fx, evals, converged};
}

inline OptResult run_optimizer(OptimizerKind kind, const Objective& f, std::vector<double> x0,
                               const OptimizerConfig& cfg) {
  switch (kind) {
    case OptimizerKind::NelderMead: return nelder_mead(f, std::move(x0), cfg);
    case OptimizerKind::Spsa: return spsa(f, std::move(x0), cfg);
    case OptimizerKind::LbfgsFd: return lbfgs_fd(f, std::move(x0), cfg);
  }
  throw std::invalid_argument("run_optimizer: unknown optimizer kind");
}

// ---------------------------------------------------------------------------
// 2-design fidelity machinery

/// The single-qubit projective 2-design:
///   |0>,  sqrt(1/3)|0> + sqrt(2/3) w^j |1>,  w = exp(i 2pi/3), j = 0,1,2.
inline std::array<PureState, 4> two_design_states() {
  std::array<PureState, 4> out;
  ComplexVector v0(2);
  v0 << 1.0, 0.0;
  out[0] = PureState{v0};
  double c0 = std::sqrt(1.0 / 3.0), c1 = std::sqrt(2.0 / 3.0);
  for (int j = 0; j < 3; ++j) {
    ComplexVector v(2);
    v << c0, c1 * std::exp(Complex(0, 2.0 * kPi * j / 3.0));
    out[static_cast<size_t>(j + 1)] = PureState{v};
  }
  return out;
}

/// Mean survival probability over the 2-design states. For single-qubit CPTP
/// maps this equals the Haar-average entanglement fidelity (2 F_C + 1)/3.
template <channel_like C>
double avg_fidelity_2design(const C& ch) {
  if (ch.dim_in() != 2 || ch.dim_out() != 2)
    throw std::invalid_argument("avg_fidelity_2design: channel is not single-qubit");
  double acc = 0.0;
  for (const PureState& psi : two_design_states()) {
    ComplexMatrix rho = psi.amplitudes * psi.amplitudes.adjoint();
    acc += (psi.amplitudes.adjoint() * ch.apply_matrix(rho) * psi.amplitudes)(0).real();
  }
  return acc / 4.0;
}

/// Monte-Carlo estimate of avg_fidelity_2design: per shot, draw one of the 4
/// states uniformly and flip a coin with its exact survival probability.
template <channel_like C>
double shot_estimator(const C& ch, long shots, std::uint64_t seed) {
  if (shots <= 0) throw std::invalid_argument("shot_estimator: shots must be positive");
  std::array<double, 4> p{};
  auto states = two_design_states();
  for (size_t i = 0; i < 4; ++i) {
    ComplexMatrix rho = states[i].amplitudes * states[i].amplitudes.adjoint();
    p[i] = (states[i].amplitudes.adjoint() * ch.apply_matrix(rho) * states[i].amplitudes)(0).real();
  }
  Rng rng(seed);
  long hits = 0;
  for (long s = 0; s < shots; ++s) {
    size_t which = static_cast<size_t>(rng.uniform_index(4));
    if (rng.uniform() < p[which]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(shots);
}

// ---------------------------------------------------------------------------
// Training protocols

struct TrainResult {
  std::vector<double> best_params;
  double best_fidelity = 0.0;
  std::vector<double> per_restart_fidelities;
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

inline std::vector<double> restart_start(int restart, size_t dim, std::uint64_t seed) {
  std::vector<double> x0(dim, 0.0);
  if (restart == 0) return x0;  // one restart always probes the original code
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
  for (auto& v : x0) v = rng.uniform(0.0, 2.0 * kPi);
  return x0;
}

}  // namespace detail

/// Multistart driver shared by the training entry points. The per-restart
/// work must be pure; work item r always fills slot r, so the outcome does
/// not depend on scheduling.
inline std::vector<OptResult> multistart_runs(
    const std::function<OptResult(int restart, const std::vector<double>& x0)>& solve_one,
    size_t dim, const OptimizerConfig& cfg, int threads = 1) {
  cfg.check();
  std::vector<OptResult> results(static_cast<size_t>(cfg.restarts));
  parallel_for(
      cfg.restarts,
      [&](Index r) {
        auto x0 = detail::restart_start(static_cast<int>(r), dim, cfg.seed);
        results[static_cast<size_t>(r)] = solve_one(static_cast<int>(r), x0);
      },
      threads);
  return results;
}

inline TrainResult reduce_multistart(const std::vector<OptResult>& results) {
  TrainResult out;
  out.best_fidelity = -1.0;
  for (const auto& res : results) {
    out.per_restart_fidelities.push_back(res.value);
    out.evaluations += res.evaluations;
    out.converged = out.converged && res.converged;
    if (res.value > out.best_fidelity) {
      out.best_fidelity = res.value;
      out.best_params = res.x;
    }
  }
  return out;
}

/// Solver accuracy used inside optimizer loops, where only the shape of the
/// landscape matters; winners are always re-scored at full accuracy.
inline SdpOptions loose_sdp_options() {
  SdpOptions o;
  o.primal_tol = 1e-4;
  o.dual_tol = 1e-4;
  return o;
}

/// Trains the five crossing angles of the adjustable K5 family against
/// `noise`, scoring every candidate by the SDP-optimal recovery fidelity.
/// Training solves run at `objective_sdp` accuracy; the returned best value
/// is re-solved at `final_sdp` accuracy.
template <channel_like N>
TrainResult train_alpha_sdp(const N& noise, const OptimizerConfig& cfg,
                            SdpOptions objective_sdp = loose_sdp_options(),
                            SdpOptions final_sdp = {}, int threads = 1) {
  if (noise.dim_in() != 32 || noise.dim_out() != 32)
    throw std::invalid_argument("train_alpha_sdp: noise must act on five qubits");

  auto solve_one = [&](int, const std::vector<double>& x0) {
    SdpState warm;
    Objective obj = [&](std::span<const double> a) {
      Encoder e = vgqec_k5_encoder({a[0], a[1], a[2], a[3], a[4]});
      return optimal_recovery_fidelity(e, noise, objective_sdp, &warm);
    };
    return run_optimizer(cfg.kind, obj, x0, cfg);
  };
  std::vector<OptResult> runs = multistart_runs(solve_one, 5, cfg, threads);

  // Training values carry the relaxed solver's bias. Re-score at full
  // accuracy down the leaderboard until the verified leader dominates every
  // remaining training-accuracy value; usually that is a single solve.
  auto rescore = [&](const std::vector<double>& x) {
    Encoder e = vgqec_k5_encoder({x[0], x[1], x[2], x[3], x[4]});
    return optimal_recovery_fidelity(e, noise, final_sdp);
  };
  std::vector<size_t> order(runs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return runs[a].value > runs[b].value; });
  double best_tight = -1.0;
  for (size_t r : order) {
    if (runs[r].value <= best_tight) break;
    runs[r].value = rescore(runs[r].x);
    best_tight = std::max(best_tight, runs[r].value);
  }
  return reduce_multistart(runs);
}

/// Everything train_full produces: the scalar results plus the optimized
/// encode / recover maps.
struct TrainedCode {
  TrainResult result;
  std::vector<double> best_alpha;
  std::vector<double> best_beta;
  Encoder encoder;
  KrausChannel recovery;
};

/// Trains the full hybrid scheme: E' = U_E(alpha) ∘ E_c against
/// R' = R_orig ∘ Tr_anc ∘ U_R(beta), maximizing the 2-design average
/// entanglement fidelity of R' ∘ noise ∘ E'.
template <channel_like N>
TrainedCode train_full(const N& noise, const Encoder& e_c, const Circuit& u_e, const Circuit& u_r,
                       const KrausChannel& r_orig, OptimizerConfig cfg, int threads = 1) {
  if (noise.dim_in() != e_c.dim_out())
    throw std::invalid_argument("train_full: noise/encoder dimension mismatch");

  const size_t n_alpha = static_cast<size_t>(u_e.parameter_count);
  const size_t n_total = n_alpha + static_cast<size_t>(u_r.parameter_count);

  auto objective = [&](std::span<const double> theta) {
    Encoder e = vgqec_encoder(e_c, u_e, theta.first(n_alpha));
    KrausChannel rprime = vgqec_recovery(u_r, theta.subspan(n_alpha), r_orig);
    double acc = 0.0;
    for (const PureState& psi : two_design_states()) {
      ComplexVector enc = e.isometry * psi.amplitudes;
      ComplexMatrix rho = enc * enc.adjoint();
      rho = noise.apply_matrix(rho);
      rho = rprime.apply_matrix(rho);
      acc += (psi.amplitudes.adjoint() * rho * psi.amplitudes)(0).real();
    }
    return acc / 4.0;
  };

  auto solve_one = [&](int, const std::vector<double>& x0) {
    return run_optimizer(cfg.kind, objective, x0, cfg);
  };
  TrainResult result = reduce_multistart(multistart_runs(solve_one, n_total, cfg, threads));

  TrainedCode out;
  out.best_alpha.assign(result.best_params.begin(),
                        result.best_params.begin() + static_cast<long>(n_alpha));
  out.best_beta.assign(result.best_params.begin() + static_cast<long>(n_alpha),
                       result.best_params.end());
  out.encoder = vgqec_encoder(e_c, u_e, out.best_alpha);
  out.recovery = vgqec_recovery(u_r, out.best_beta, r_orig);
  out.result = std::move(result);
  return out;
}

}  // namespace vgqec
