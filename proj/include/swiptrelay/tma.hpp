#pragma once

// Transmission-mode adaptation: each subcarrier either relays through the
// cooperative two-hop path (source power p_sr, harvested relay power p_r,
// destination combines relay and direct copies) or transmits directly
// (source power p_sd, relay harvests p_sd h_n as a by-product), or idles.
//
//   rate = sum_{direct} ln(1 + p_sd f_n)
//        + 1/2 min( sum_{coop} ln(1 + p_sr h_n),
//                   sum_{coop} ln(1 + p_r g_n + p_sr f_n) )
//   subject to the sum power budget over all source powers, the relay
//   spending no more than sum_{direct} p_sd h_n, and per-subcarrier masks.
//
// Dual decomposition over (beta, gamma, delta): per subcarrier, candidate
// powers for both modes, then the mode with the larger non-negative
// Lagrangian contribution wins (LP relaxation of the binary assignment is
// tight at an extreme point).  Two inner power solvers are provided:
//   paper_closed_form    - separable closed forms that price the two
//                          cooperative powers independently
//   exact_per_subcarrier - coordinate-wise exact maximization of the
//                          per-subcarrier concave objective to a fixed
//                          point (the two differ; see README)

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "ellipsoid.hpp"
#include "ps.hpp"
#include "waterfilling.hpp"

namespace swiptrelay {

enum class TmaInnerSolver { paper_closed_form, exact_per_subcarrier };

struct TmaConfig {
  double total_power = 100.0;
  double peak_power = kDefaultPeakPower;
  TmaInnerSolver inner_solver = TmaInnerSolver::exact_per_subcarrier;
  EllipsoidOptions ellipsoid{};

  void validate() const {
    if (!(total_power >= 0.0) || !std::isfinite(total_power))
      throw ConfigError("tma: total_power must be finite and >= 0");
    if (!(peak_power > 0.0) || !std::isfinite(peak_power))
      throw ConfigError("tma: peak_power must be finite and > 0");
  }
};

struct TmaSolution {
  std::vector<int> y_c, y_d;  // 0/1 mode indicators, at most one set per subcarrier
  std::vector<double> p_sr, p_sd, p_r;
  double rate_direct = 0.0;  // nats per frame
  double rate_coop = 0.0;
  double rate = 0.0;
  DualPoint duals;  // (beta, gamma, delta)
  bool converged = false;
};

struct TmaPowers {
  double p_sr = 0.0;
  double p_r = 0.0;
  double p_sd = 0.0;
};

namespace detail {

// Direct-mode source power: water-filling against the net price
// gamma - delta h (harvesting at the relay rebates delta h per unit).
inline double tma_psd_power(double gamma, double delta, double h, double f, double peak) {
  const double price = gamma - delta * h;
  if (price <= 0.0) return peak;
  if (f <= 0.0) return 0.0;
  return std::clamp(1.0 / price - 1.0 / f, 0.0, peak);
}

// Separable closed forms for the cooperative powers.
inline std::pair<double, double> tma_coop_powers_closed_form(double beta, double gamma,
                                                             double delta, double h, double f,
                                                             double g, double peak) {
  double p_sr;
  if (gamma - delta <= 0.0) {
    p_sr = peak;
  } else if (h <= 0.0) {
    p_sr = 0.0;
  } else {
    p_sr = std::clamp(beta / (2.0 * (gamma - delta)) - 1.0 / h, 0.0, peak);
  }

  double p_r;
  if (g <= 0.0) {
    p_r = 0.0;
  } else if (delta <= 0.0) {
    p_r = peak;
  } else {
    p_r = std::clamp((1.0 - beta) * f / (2.0 * delta * g) - p_sr * f / g - 1.0 / g, 0.0, peak);
  }
  return {p_sr, p_r};
}

// d/dp of (beta/2) ln(1+p h) + ((1-beta)/2) ln(c + p f) - gamma p.
inline double tma_psr_slope(double p, double beta, double gamma, double h, double f, double c) {
  return beta / 2.0 * h / (1.0 + p * h) + (1.0 - beta) / 2.0 * f / (c + p * f) - gamma;
}

// Exact maximizer over p in [0, peak] at fixed relay power (c = 1 + p_r g).
// The stationarity condition is a quadratic; the slope is strictly
// decreasing, so exactly one root lies in the bracket when the endpoint
// signs differ.
inline double tma_psr_exact(double beta, double gamma, double h, double f, double c,
                            double peak) {
  if (tma_psr_slope(0.0, beta, gamma, h, f, c) <= 0.0) return 0.0;
  if (tma_psr_slope(peak, beta, gamma, h, f, c) >= 0.0) return peak;

  const double a_coef = beta / 2.0 * h;
  const double b_coef = (1.0 - beta) / 2.0 * f;
  const double q2 = -gamma * h * f;
  const double q1 = a_coef * f + b_coef * h - gamma * (f + c * h);
  const double q0 = a_coef * c + b_coef - gamma * c;

  double root = -1.0;
  if (q2 != 0.0) {
    const double disc = q1 * q1 - 4.0 * q2 * q0;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      const double qq = -0.5 * (q1 + (q1 >= 0.0 ? s : -s));
      const double r1 = qq / q2;
      const double r2 = qq != 0.0 ? q0 / qq : -1.0;
      if (r1 > 0.0 && r1 < peak)
        root = r1;
      else if (r2 > 0.0 && r2 < peak)
        root = r2;
    }
  } else if (q1 != 0.0) {
    root = -q0 / q1;
  }
  if (root > 0.0 && root < peak) return root;

  double lo = 0.0, hi = peak;  // fallback for degenerate coefficients
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (tma_psr_slope(mid, beta, gamma, h, f, c) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Alternating exact coordinate maximization of the cooperative
// per-subcarrier objective; both coordinate problems are solved in closed
// form, so the fixed point is the joint maximizer of the concave term.
inline std::pair<double, double> tma_coop_powers_exact(double beta, double gamma, double delta,
                                                       double h, double f, double g,
                                                       double peak) {
  double p_sr = 0.0, p_r = 0.0;
  const double tol = 1e-10 * std::max(1.0, peak);
  for (int iter = 0; iter < 50; ++iter) {
    const double c = 1.0 + p_r * g;
    const double new_psr = tma_psr_exact(beta, gamma, h, f, c, peak);
    double new_pr;
    if (g <= 0.0) {
      new_pr = 0.0;
    } else if (delta <= 0.0) {
      new_pr = beta < 1.0 ? peak : 0.0;
    } else {
      new_pr = std::clamp((1.0 - beta) / (2.0 * delta) - (1.0 + new_psr * f) / g, 0.0, peak);
    }
    const bool done = std::abs(new_psr - p_sr) <= tol && std::abs(new_pr - p_r) <= tol;
    p_sr = new_psr;
    p_r = new_pr;
    if (done) break;
  }
  return {p_sr, p_r};
}

inline TmaPowers tma_candidate_powers(const std::array<double, 3>& duals, double h, double f,
                                      double g, double peak, TmaInnerSolver mode) {
  TmaPowers pw;
  const auto [psr, pr] =
      mode == TmaInnerSolver::paper_closed_form
          ? tma_coop_powers_closed_form(duals[0], duals[1], duals[2], h, f, g, peak)
          : tma_coop_powers_exact(duals[0], duals[1], duals[2], h, f, g, peak);
  pw.p_sr = psr;
  pw.p_r = pr;
  pw.p_sd = tma_psd_power(duals[1], duals[2], h, f, peak);
  return pw;
}

}  // namespace detail

struct ModeDecision {
  int y_c = 0;
  int y_d = 0;
  double j_coop = 0.0;    // per-subcarrier Lagrangian of the cooperative mode
  double j_direct = 0.0;  // same for the direct mode
};

// Pick the mode with the larger non-negative Lagrangian contribution;
// both negative means the subcarrier idles.  Ties go cooperative.
inline ModeDecision mode_select(const std::array<double, 3>& duals, const TmaPowers& pw,
                                double h, double f, double g) {
  const double beta = duals[0], gamma = duals[1], delta = duals[2];
  ModeDecision md;
  md.j_coop = beta / 2.0 * std::log1p(pw.p_sr * h) +
              (1.0 - beta) / 2.0 * std::log1p(pw.p_sr * f + pw.p_r * g) - pw.p_sr * gamma -
              pw.p_r * delta;
  md.j_direct = std::log1p(pw.p_sd * f) - pw.p_sd * (gamma - delta * h);
  if (std::max(md.j_coop, md.j_direct) < 0.0) return md;
  if (md.j_coop >= md.j_direct)
    md.y_c = 1;
  else
    md.y_d = 1;
  return md;
}

// Closed-form (or exact) candidate powers for one subcarrier at the given
// multipliers, before mode selection.
inline TmaPowers prop2_powers(const std::array<double, 3>& duals, double h, double f, double g,
                              const TmaConfig& cfg) {
  return detail::tma_candidate_powers(duals, h, f, g, cfg.peak_power, cfg.inner_solver);
}

namespace detail {

struct TmaDualInfo {
  double value = 0.0;
  std::array<double, 3> subgrad{};
};

// modes: nullptr for free mode selection, otherwise per-subcarrier
// 0 = idle, 1 = cooperative, 2 = direct, fixed.
inline TmaDualInfo tma_dual_point(const ChannelRealization& ch, const TmaConfig& cfg,
                                  const std::vector<double>& duals,
                                  const std::vector<std::uint8_t>* modes,
                                  std::vector<std::uint8_t>* modes_out = nullptr) {
  const std::array<double, 3> d{duals[0], duals[1], duals[2]};
  const int n = ch.size();

  double value = d[1] * cfg.total_power;
  double hop1 = 0.0, hop2 = 0.0, sum_src = 0.0, sum_pr = 0.0, harvest = 0.0;
  if (modes_out) modes_out->assign(n, 0);

  for (int i = 0; i < n; ++i) {
    const TmaPowers pw =
        tma_candidate_powers(d, ch.h[i], ch.f[i], ch.g[i], cfg.peak_power, cfg.inner_solver);
    const ModeDecision md = mode_select(d, pw, ch.h[i], ch.f[i], ch.g[i]);

    int chosen;  // 0 idle, 1 coop, 2 direct
    if (modes) {
      chosen = (*modes)[i];
      value += chosen == 1 ? md.j_coop : chosen == 2 ? md.j_direct : 0.0;
    } else {
      chosen = md.y_c ? 1 : md.y_d ? 2 : 0;
      value += std::max({md.j_coop, md.j_direct, 0.0});
    }
    if (modes_out) (*modes_out)[i] = static_cast<std::uint8_t>(chosen);

    if (chosen == 1) {
      hop1 += std::log1p(pw.p_sr * ch.h[i]);
      hop2 += std::log1p(pw.p_r * ch.g[i] + pw.p_sr * ch.f[i]);
      sum_src += pw.p_sr;
      sum_pr += pw.p_r;
    } else if (chosen == 2) {
      sum_src += pw.p_sd;
      harvest += pw.p_sd * ch.h[i];
    }
  }

  TmaDualInfo info;
  info.value = value;
  info.subgrad = {0.5 * hop1 - 0.5 * hop2, cfg.total_power - sum_src, harvest - sum_pr};
  return info;
}

inline TmaSolution tma_zero_solution(int n) {
  TmaSolution s;
  s.y_c.assign(n, 0);
  s.y_d.assign(n, 0);
  s.p_sr.assign(n, 0.0);
  s.p_sd.assign(n, 0.0);
  s.p_r.assign(n, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  s.duals = {{0.5, 0.0, 0.0}, {0.0, 0.0, 0.0}, {1.0, inf, inf}};
  s.converged = true;
  return s;
}

// Complete a fixed source assignment on a fixed pattern: relay water-fill
// against the realized harvest (direct-path terms enter as offsets on the
// cooperative subcarriers), then the exact end rates.
inline TmaSolution tma_finish_pattern(const ChannelRealization& ch, const TmaConfig& cfg,
                                      const std::vector<std::uint8_t>& modes,
                                      std::vector<double> p_sr, std::vector<double> p_sd) {
  const int n = ch.size();
  TmaSolution sol;
  sol.y_c.assign(n, 0);
  sol.y_d.assign(n, 0);
  sol.p_sr = std::move(p_sr);
  sol.p_sd = std::move(p_sd);

  double budget = 0.0;
  std::vector<double> wf_gain(n, 0.0), wf_cap(n, 0.0), wf_off(n, 1.0);
  for (int i = 0; i < n; ++i) {
    if (modes[i] != 1) sol.p_sr[i] = 0.0;
    if (modes[i] != 2) sol.p_sd[i] = 0.0;
    if (modes[i] == 1) {
      sol.y_c[i] = 1;
      wf_gain[i] = ch.g[i];
      wf_cap[i] = cfg.peak_power;
      wf_off[i] = 1.0 + sol.p_sr[i] * ch.f[i];
    } else if (modes[i] == 2) {
      sol.y_d[i] = 1;
      budget += sol.p_sd[i] * ch.h[i];
    }
  }
  sol.p_r = capped_waterfill(wf_gain, wf_cap, budget, &wf_off);

  double hop1 = 0.0, hop2 = 0.0;
  for (int i = 0; i < n; ++i) {
    if (sol.y_c[i]) {
      hop1 += std::log1p(sol.p_sr[i] * ch.h[i]);
      hop2 += std::log1p(sol.p_r[i] * ch.g[i] + sol.p_sr[i] * ch.f[i]);
    } else if (sol.y_d[i]) {
      sol.rate_direct += std::log1p(sol.p_sd[i] * ch.f[i]);
    }
  }
  sol.rate_coop = 0.5 * std::min(hop1, hop2);
  sol.rate = sol.rate_direct + sol.rate_coop;
  return sol;
}

// Feasible primal with the mode pattern fixed.  Two constructions compete:
// the dual-point powers on the active subcarriers, inflated or scaled so
// the source budget is spent exactly (every rate term is nondecreasing in
// every source power, so spending the whole budget never hurts), and a
// direct scan of the budget share between the two groups.  The scan is
// what survives the dual's kinks: with a vanishing direct gain the
// direct-mode term is linear in its power, so the multipliers pin that
// power to an endpoint and the scaled construction cannot balance the
// hops.  Within a share, relay-bound sources water-fill on h and direct
// sources either water-fill on f or fill the strongest h first, whichever
// finishes better.
inline TmaSolution tma_restore_pattern(const ChannelRealization& ch, const TmaConfig& cfg,
                                       const std::vector<TmaPowers>& cand,
                                       const std::vector<std::uint8_t>& modes, bool thorough) {
  const int n = ch.size();
  std::vector<int> coop, direct;
  for (int i = 0; i < n; ++i) {
    if (modes[i] == 1)
      coop.push_back(i);
    else if (modes[i] == 2)
      direct.push_back(i);
  }

  std::vector<double> p_sr(n, 0.0), p_sd(n, 0.0);
  if (!coop.empty() || !direct.empty()) {
    std::vector<double> src;
    src.reserve(coop.size() + direct.size());
    for (int i : coop) src.push_back(cand[i].p_sr);
    for (int i : direct) src.push_back(cand[i].p_sd);
    src = scale_to_budget(std::move(src), cfg.peak_power, cfg.total_power);
    std::size_t k = 0;
    for (int i : coop) p_sr[i] = src[k++];
    for (int i : direct) p_sd[i] = src[k++];
  }
  TmaSolution best = tma_finish_pattern(ch, cfg, modes, std::move(p_sr), std::move(p_sd));

  const double n_active = static_cast<double>(coop.size() + direct.size());
  const double budget = std::min(cfg.total_power, cfg.peak_power * n_active);
  if (budget <= 0.0 || (coop.empty() && direct.empty())) return best;

  std::vector<double> coop_gain(n, 0.0), coop_cap(n, 0.0);
  for (int i : coop) {
    coop_gain[i] = ch.h[i];
    coop_cap[i] = cfg.peak_power;
  }
  std::vector<double> dir_gain(n, 0.0), dir_cap(n, 0.0);
  for (int i : direct) {
    dir_gain[i] = ch.f[i];
    dir_cap[i] = cfg.peak_power;
  }
  std::vector<int> by_h(direct);
  std::stable_sort(by_h.begin(), by_h.end(), [&](int a, int b) { return ch.h[a] > ch.h[b]; });

  double best_share = 0.0;
  const auto eval_share = [&](double t) {
    double p_dir =
        std::min(t * budget, cfg.peak_power * static_cast<double>(direct.size()));
    const double p_coop =
        std::min(budget - p_dir, cfg.peak_power * static_cast<double>(coop.size()));
    p_dir = std::min(budget - p_coop, cfg.peak_power * static_cast<double>(direct.size()));

    std::vector<double> sr = capped_waterfill(coop_gain, coop_cap, p_coop);
    {
      TmaSolution s = tma_finish_pattern(ch, cfg, modes, sr,
                                         capped_waterfill(dir_gain, dir_cap, p_dir));
      if (s.rate > best.rate) {
        best = std::move(s);
        best_share = t;
      }
    }
    std::vector<double> sd(n, 0.0);
    double left = p_dir;
    for (int i : by_h) {
      sd[i] = std::min(cfg.peak_power, left);
      left -= sd[i];
      if (left <= 0.0) break;
    }
    TmaSolution s = tma_finish_pattern(ch, cfg, modes, std::move(sr), std::move(sd));
    if (s.rate > best.rate) {
      best = std::move(s);
      best_share = t;
    }
  };

  if (coop.empty() || direct.empty()) {
    eval_share(coop.empty() ? 1.0 : 0.0);
    return best;
  }
  const int steps = thorough ? 32 : 8;
  for (int k = 0; k <= steps; ++k)
    eval_share(static_cast<double>(k) / static_cast<double>(steps));
  if (thorough) {
    const double width = 1.0 / static_cast<double>(steps);
    const double lo = std::max(0.0, best_share - width);
    const double hi = std::min(1.0, best_share + width);
    for (int k = 0; k <= steps; ++k)
      eval_share(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps));
  }
  return best;
}

inline TmaSolution solve_tma_impl(const ChannelRealization& ch, const TmaConfig& cfg,
                                  const std::vector<std::uint8_t>* fixed_modes) {
  cfg.validate();
  ps_validate_channels(ch);
  const int n = ch.size();
  if (cfg.total_power <= 0.0) return tma_zero_solution(n);

  ConvexEval eval = [&](const std::vector<double>& x) {
    const TmaDualInfo info = tma_dual_point(ch, cfg, x, fixed_modes);
    return std::make_pair(info.value,
                          std::vector<double>(info.subgrad.begin(), info.subgrad.end()));
  };

  const double inf = std::numeric_limits<double>::infinity();
  const double radius = 10.0 * std::max(1.0, cfg.total_power);
  EllipsoidResult res;
  try {
    res = ellipsoid_minimize(eval, {0.0, 0.0, 0.0}, {1.0, inf, inf}, {0.5, 1.0, 1.0}, radius,
                             cfg.ellipsoid);
  } catch (const NumericError&) {
    // The closed-form inner mode evaluates the Lagrangian at allocations
    // that need not maximize it, so the surface handed to the ellipsoid is
    // not guaranteed convex and its cuts can be inconsistent enough to
    // corrupt the shape matrix.  Retry on a shrinking iteration leash and
    // settle for the best incumbent rather than aborting the whole solve.
    EllipsoidOptions capped = cfg.ellipsoid;
    bool recovered = false;
    for (long cap : {100L, 30L, 10L}) {
      capped.max_iter = cap;
      try {
        res = ellipsoid_minimize(eval, {0.0, 0.0, 0.0}, {1.0, inf, inf}, {0.5, 1.0, 1.0},
                                 radius, capped);
        recovered = true;
        break;
      } catch (const NumericError&) {
      }
    }
    if (!recovered) {
      TmaSolution s = tma_zero_solution(n);
      s.converged = false;
      return s;
    }
    res.converged = false;
  }

  const std::array<double, 3> d{res.best.values[0], res.best.values[1], res.best.values[2]};
  std::vector<TmaPowers> cand(n);
  std::vector<ModeDecision> dec(n);
  for (int i = 0; i < n; ++i) {
    cand[i] = tma_candidate_powers(d, ch.h[i], ch.f[i], ch.g[i], cfg.peak_power,
                                   cfg.inner_solver);
    dec[i] = mode_select(d, cand[i], ch.h[i], ch.f[i], ch.g[i]);
  }

  std::vector<std::vector<std::uint8_t>> patterns;
  if (fixed_modes) {
    patterns.push_back(*fixed_modes);
  } else if (n <= 2) {
    // Tiny instances: enumerate every mode pattern outright.
    int count = 1;
    for (int i = 0; i < n; ++i) count *= 3;
    for (int code = 0; code < count; ++code) {
      std::vector<std::uint8_t> pat(n);
      int rem = code;
      for (int i = 0; i < n; ++i) {
        pat[i] = static_cast<std::uint8_t>(rem % 3);
        rem /= 3;
      }
      patterns.push_back(std::move(pat));
    }
  } else {
    // The binary recovery from one dual point is fragile: a near-tie in the
    // per-subcarrier mode comparison can starve the relay of harvest (or
    // the reverse).  Sweep the coop/direct boundary along the dual margins
    // and keep whichever feasible pattern restores the best rate.
    std::vector<std::uint8_t> from_duals(n, 0);
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
      from_duals[i] = dec[i].y_c ? 1 : dec[i].y_d ? 2 : 0;
      if (from_duals[i] != 0) active.push_back(i);
    }
    patterns.push_back(from_duals);
    std::stable_sort(active.begin(), active.end(), [&](int a, int b) {
      return dec[a].j_coop - dec[a].j_direct > dec[b].j_coop - dec[b].j_direct;
    });
    for (std::size_t k = 0; k <= active.size(); ++k) {
      std::vector<std::uint8_t> pat(n, 0);
      for (std::size_t j = 0; j < active.size(); ++j) pat[active[j]] = j < k ? 1 : 2;
      patterns.push_back(std::move(pat));
    }
    // The same boundary sweep ordered by the source-relay gain instead:
    // cooperation needs a strong first hop, and the dual margins misorder
    // subcarriers when the multipliers sit near a kink.  Its endpoints
    // cover the all-cooperative and all-direct patterns.
    std::vector<int> by_h(n);
    std::iota(by_h.begin(), by_h.end(), 0);
    std::stable_sort(by_h.begin(), by_h.end(),
                     [&](int a, int b) { return ch.h[a] > ch.h[b]; });
    for (int k = 0; k <= n; ++k) {
      std::vector<std::uint8_t> pat(n, 0);
      for (int j = 0; j < n; ++j) pat[by_h[j]] = j < k ? 1 : 2;
      patterns.push_back(std::move(pat));
    }
  }

  TmaSolution best;
  best.rate = -1.0;

  if (fixed_modes) {
    best = tma_restore_pattern(ch, cfg, cand, patterns.front(), true);
    best.duals = res.best;
    best.converged = res.converged;
    return best;
  }

  // Up to this size, each candidate pattern is worth a frozen-mode dual
  // solve of its own: the free-mode multipliers can size powers badly for
  // patterns they did not select, and with few subcarriers a single
  // misallocated one is a large rate loss.
  if (n <= 8) {
    for (const auto& pat : patterns) {
      TmaSolution s = solve_tma_impl(ch, cfg, &pat);
      if (s.rate > best.rate) best = std::move(s);
    }
    best.converged = best.converged && res.converged;
    return best;
  }

  // Larger instances: cheap restoration of every pattern, a thorough one
  // for the short list it produces, then a frozen-mode dual solve for the
  // winner, whose specialized multipliers usually buy a little more rate.
  std::vector<double> cheap(patterns.size());
  std::size_t best_pat = 0;
  for (std::size_t k = 0; k < patterns.size(); ++k) {
    TmaSolution s = tma_restore_pattern(ch, cfg, cand, patterns[k], false);
    cheap[k] = s.rate;
    if (s.rate > best.rate) {
      best = std::move(s);
      best_pat = k;
    }
  }
  std::vector<std::size_t> order(patterns.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cheap[a] > cheap[b]; });
  for (std::size_t j = 0; j < std::min<std::size_t>(3, order.size()); ++j) {
    TmaSolution s = tma_restore_pattern(ch, cfg, cand, patterns[order[j]], true);
    if (s.rate > best.rate) {
      best = std::move(s);
      best_pat = order[j];
    }
  }
  best.duals = res.best;
  best.converged = res.converged;

  TmaSolution refined = solve_tma_impl(ch, cfg, &patterns[best_pat]);
  if (refined.rate > best.rate) {
    refined.converged = refined.converged && res.converged;
    best = std::move(refined);
  }
  return best;
}

}  // namespace detail

inline TmaSolution solve_tma(const ChannelRealization& ch, const TmaConfig& cfg) {
  return detail::solve_tma_impl(ch, cfg, nullptr);
}

// Same dual power optimization with the mode pattern frozen.
inline TmaSolution solve_tma_with_modes(const ChannelRealization& ch, const TmaConfig& cfg,
                                        const std::vector<int>& y_c,
                                        const std::vector<int>& y_d) {
  const std::size_t n = ch.h.size();
  if (y_c.size() != n || y_d.size() != n)
    throw ConfigError("tma: mode vectors must match the subcarrier count");
  std::vector<std::uint8_t> modes(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (y_c[i] && y_d[i]) throw ConfigError("tma: a subcarrier cannot use both modes");
    modes[i] = y_c[i] ? 1 : y_d[i] ? 2 : 0;
  }
  return detail::solve_tma_impl(ch, cfg, &modes);
}

// End-to-end rate of a candidate solution, recomputed from its fields.
inline double tma_rate(const TmaSolution& s, const ChannelRealization& ch) {
  const int n = ch.size();
  double direct = 0.0, hop1 = 0.0, hop2 = 0.0;
  for (int i = 0; i < n; ++i) {
    if (s.y_c[i]) {
      hop1 += std::log1p(s.p_sr[i] * ch.h[i]);
      hop2 += std::log1p(s.p_r[i] * ch.g[i] + s.p_sr[i] * ch.f[i]);
    } else if (s.y_d[i]) {
      direct += std::log1p(s.p_sd[i] * ch.f[i]);
    }
  }
  return direct + 0.5 * std::min(hop1, hop2);
}

}  // namespace swiptrelay
