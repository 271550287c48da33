#pragma once

// Power-splitting protocol: joint source power, relay power and splitting
// ratio for a two-hop decode-and-forward OFDM link where the relay runs on
// harvested energy only.
//
// Primal problem, natural log, unit noise:
//   maximize   1/2 * min( sum_n ln(1 + p_s,n h_n a), sum_n ln(1 + p_r,n g_n) )
//   subject to sum_n p_s,n <= P_total
//              sum_n p_r,n <= sum_n p_s,n h_n (1-a)
//              0 <= p <= peak,  a in [0,1]
//
// Solved by Lagrangian dual decomposition: for multipliers (lambda, mu, nu)
// the inner maximization has closed-form per-subcarrier powers for each
// splitting ratio; the ratio itself is enumerated on a finite grid; the
// ellipsoid method drives the multipliers.  The returned primal point is
// re-feasibilized (source scaling + relay water-fill) before reporting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "ellipsoid.hpp"
#include "waterfilling.hpp"

namespace swiptrelay {

struct PsConfig {
  double total_power = 100.0;            // linear; 20 dB over unit noise
  double peak_power = kDefaultPeakPower; // per-subcarrier mask, linear
  double alpha_step = 1e-3;              // splitting-ratio grid step
  EllipsoidOptions ellipsoid{};

  void validate() const {
    if (!(total_power >= 0.0) || !std::isfinite(total_power))
      throw ConfigError("ps: total_power must be finite and >= 0");
    if (!(peak_power > 0.0) || !std::isfinite(peak_power))
      throw ConfigError("ps: peak_power must be finite and > 0");
    if (!(alpha_step > 0.0) || !(alpha_step < 1.0))
      throw ConfigError("ps: alpha_step must be in (0,1)");
  }
};

struct PsSolution {
  std::vector<double> p_s;
  std::vector<double> p_r;
  double alpha = 0.0;
  double rate_hop1 = 0.0;  // nats per two-slot frame
  double rate_hop2 = 0.0;
  double rate = 0.0;       // min of the two hops
  DualPoint duals;         // (lambda, mu, nu)
  bool converged = false;
};

// Splitting-ratio grid {0, step, 2*step, ..., 1}.
inline std::vector<double> alpha_grid(double step) {
  std::vector<double> grid;
  for (long k = 0;; ++k) {
    const double a = static_cast<double>(k) * step;
    if (a >= 1.0) break;
    grid.push_back(a);
  }
  grid.push_back(1.0);
  return grid;
}

namespace detail {

// Inner-maximizer source power for one subcarrier at fixed ratio.  The
// per-subcarrier Lagrangian term is lambda/2 * ln(1 + p h a) - p * price
// with price = mu - nu h (1-a); non-positive price means the mask binds.
inline double ps_source_power(double lambda, double mu, double nu, double alpha, double h,
                              double peak) {
  const double price = mu - nu * h * (1.0 - alpha);
  if (price <= 0.0) return peak;
  if (alpha <= 0.0 || h <= 0.0) return 0.0;
  const double p = lambda / (2.0 * price) - 1.0 / (h * alpha);
  return std::clamp(p, 0.0, peak);
}

// Inner-maximizer relay power: water-fill against the harvesting price nu.
inline double ps_relay_power(double lambda, double nu, double g, double peak) {
  if (g <= 0.0) return 0.0;
  if (nu <= 0.0) return lambda < 1.0 ? peak : 0.0;
  const double p = (1.0 - lambda) / (2.0 * nu) - 1.0 / g;
  return std::clamp(p, 0.0, peak);
}

struct PsDualInfo {
  double value = 0.0;
  std::array<double, 3> subgrad{};
  double alpha_star = 0.0;
};

// Dual function value and subgradient at (lambda, mu, nu).  The relay part
// is ratio-independent and computed once; the source part is accumulated
// per grid ratio.  Ties between maximizing ratios go to the larger
// first-hop sum, then to the smaller ratio.
inline PsDualInfo ps_dual_point(const ChannelRealization& ch, const PsConfig& cfg,
                                const std::vector<double>& alphas,
                                const std::vector<double>& duals) {
  const double lambda = duals[0], mu = duals[1], nu = duals[2];
  const int n = ch.size();
  const double peak = cfg.peak_power;
  const double lh = lambda / 2.0;

  double hop2 = 0.0, sum_pr = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pr = ps_relay_power(lambda, nu, ch.g[i], peak);
    hop2 += std::log1p(pr * ch.g[i]);
    sum_pr += pr;
  }
  const double relay_term = (1.0 - lambda) / 2.0 * hop2 - nu * sum_pr;

  const std::size_t k = alphas.size();
  std::vector<double> source_term(k, 0.0);
  for (int i = 0; i < n; ++i) {
    const double h = ch.h[i];
    const double nu_h = nu * h;
    for (std::size_t j = 0; j < k; ++j) {
      const double a = alphas[j];
      const double price = mu - nu_h * (1.0 - a);
      double p;
      if (price <= 0.0) {
        p = peak;
      } else if (a <= 0.0 || h <= 0.0) {
        p = 0.0;
      } else {
        p = std::clamp(lambda / (2.0 * price) - 1.0 / (h * a), 0.0, peak);
      }
      double term = -p * price;
      if (p > 0.0 && a > 0.0) term += lh * std::log1p(p * h * a);
      source_term[j] += term;
    }
  }

  std::size_t best = 0;
  for (std::size_t j = 1; j < k; ++j)
    if (source_term[j] > source_term[best]) best = j;

  auto hop1_at = [&](double a) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = ps_source_power(lambda, mu, nu, a, ch.h[i], peak);
      s += std::log1p(p * ch.h[i] * a);
    }
    return s;
  };
  double best_hop1 = hop1_at(alphas[best]);
  for (std::size_t j = 0; j < k; ++j) {
    if (j == best || source_term[j] != source_term[best]) continue;
    const double hop1 = hop1_at(alphas[j]);
    if (hop1 > best_hop1 || (hop1 == best_hop1 && j < best)) {
      best = j;
      best_hop1 = hop1;
    }
  }

  const double a_star = alphas[best];
  double sum_ps = 0.0, harvest = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = ps_source_power(lambda, mu, nu, a_star, ch.h[i], peak);
    sum_ps += p;
    harvest += p * ch.h[i] * (1.0 - a_star);
  }

  PsDualInfo info;
  info.alpha_star = a_star;
  info.value = source_term[best] + relay_term + mu * cfg.total_power;
  info.subgrad = {0.5 * best_hop1 - 0.5 * hop2, cfg.total_power - sum_ps, harvest - sum_pr};
  return info;
}

struct PsRestored {
  std::vector<double> p_s, p_r;
  double hop1 = 0.0, hop2 = 0.0, rate = 0.0;
};

// Feasible primal from a dual point at a fixed ratio: closed-form source
// powers scaled into the sum budget, then the relay water-filled against
// the realized harvest.
inline PsRestored ps_restore_at_alpha(const ChannelRealization& ch, const PsConfig& cfg,
                                      const std::vector<double>& duals, double a) {
  const int n = ch.size();
  PsRestored r;
  r.p_s.resize(n);
  for (int i = 0; i < n; ++i)
    r.p_s[i] = ps_source_power(duals[0], duals[1], duals[2], a, ch.h[i], cfg.peak_power);
  r.p_s = scale_to_budget(std::move(r.p_s), cfg.peak_power, cfg.total_power);
  double budget = 0.0;
  for (int i = 0; i < n; ++i) budget += r.p_s[i] * ch.h[i] * (1.0 - a);

  const std::vector<double> caps(n, cfg.peak_power);
  r.p_r = capped_waterfill(ch.g, caps, budget);

  for (int i = 0; i < n; ++i) {
    r.hop1 += std::log1p(r.p_s[i] * ch.h[i] * a);
    r.hop2 += std::log1p(r.p_r[i] * ch.g[i]);
  }
  r.hop1 *= 0.5;
  r.hop2 *= 0.5;
  r.rate = std::min(r.hop1, r.hop2);
  return r;
}

inline void ps_validate_channels(const ChannelRealization& ch) {
  const std::size_t n = ch.h.size();
  if (n == 0 || ch.g.size() != n || ch.f.size() != n)
    throw ConfigError("channels: h, g, f must be non-empty and equal length");
  for (std::size_t i = 0; i < n; ++i)
    if (!(ch.h[i] >= 0.0) || !(ch.g[i] >= 0.0) || !(ch.f[i] >= 0.0) ||
        !std::isfinite(ch.h[i]) || !std::isfinite(ch.g[i]) || !std::isfinite(ch.f[i]))
      throw ConfigError("channels: gains must be finite and >= 0");
}

inline PsSolution ps_zero_solution(int n) {
  PsSolution s;
  s.p_s.assign(n, 0.0);
  s.p_r.assign(n, 0.0);
  s.alpha = 0.0;
  s.duals = {{0.5, 0.0, 0.0}, {0.0, 0.0, 0.0},
             {1.0, std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity()}};
  s.converged = true;
  return s;
}

inline PsSolution solve_ps_on_grid(const ChannelRealization& ch, const PsConfig& cfg,
                                   const std::vector<double>& alphas) {
  cfg.validate();
  ps_validate_channels(ch);
  const int n = ch.size();
  if (cfg.total_power <= 0.0) return ps_zero_solution(n);

  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> lo{0.0, 0.0, 0.0};
  const std::vector<double> hi{1.0, inf, inf};

  ConvexEval eval = [&](const std::vector<double>& x) {
    const PsDualInfo info = ps_dual_point(ch, cfg, alphas, x);
    return std::make_pair(info.value,
                          std::vector<double>(info.subgrad.begin(), info.subgrad.end()));
  };

  const double radius = 10.0 * std::max(1.0, cfg.total_power);
  const EllipsoidResult res =
      ellipsoid_minimize(eval, lo, hi, {0.5, 0.1, 0.1}, radius, cfg.ellipsoid);

  // Restoration scans the whole ratio grid with true feasible rates; the
  // Lagrangian-maximizing ratio is one of the candidates.
  const std::vector<double>& duals = res.best.values;
  double best_rate = -1.0, best_hop1 = -1.0;
  double best_alpha = 0.0;
  PsRestored best;
  std::array<double, 3> top_rate{-1.0, -1.0, -1.0};
  std::array<double, 3> top_alpha{0.0, 0.0, 0.0};
  for (double a : alphas) {
    PsRestored cand = ps_restore_at_alpha(ch, cfg, duals, a);
    for (std::size_t j = 0; j < top_rate.size(); ++j) {
      if (cand.rate > top_rate[j]) {
        for (std::size_t m = top_rate.size() - 1; m > j; --m) {
          top_rate[m] = top_rate[m - 1];
          top_alpha[m] = top_alpha[m - 1];
        }
        top_rate[j] = cand.rate;
        top_alpha[j] = a;
        break;
      }
    }
    if (cand.rate > best_rate || (cand.rate == best_rate && cand.hop1 > best_hop1)) {
      best_rate = cand.rate;
      best_hop1 = cand.hop1;
      best_alpha = a;
      best = std::move(cand);
    }
  }

  PsSolution sol;
  sol.p_s = std::move(best.p_s);
  sol.p_r = std::move(best.p_r);
  sol.alpha = best_alpha;
  sol.rate_hop1 = best.hop1;
  sol.rate_hop2 = best.hop2;
  sol.rate = best.rate;
  sol.duals = res.best;
  sol.converged = res.converged;

  // The scan prices every ratio with the same multipliers, which can
  // undersize the source powers at ratios the free-ratio dual run did not
  // favor.  Re-solving with the ratio frozen prices it exactly, so refine
  // the leading ratios and keep whichever primal comes out ahead.
  if (alphas.size() > 1) {
    const bool free_converged = res.converged;
    for (std::size_t j = 0; j < top_rate.size(); ++j) {
      if (top_rate[j] < 0.0) continue;
      PsSolution frozen = solve_ps_on_grid(ch, cfg, {top_alpha[j]});
      if (frozen.rate > sol.rate) {
        frozen.converged = frozen.converged && free_converged;
        sol = std::move(frozen);
      }
    }
  }
  return sol;
}

}  // namespace detail

// Closed-form inner maximizer of the dual at (ratio, multipliers).
inline std::pair<std::vector<double>, std::vector<double>> prop1_powers(
    double alpha, const std::array<double, 3>& duals, const ChannelRealization& ch,
    const PsConfig& cfg) {
  detail::ps_validate_channels(ch);
  const int n = ch.size();
  std::vector<double> p_s(n), p_r(n);
  for (int i = 0; i < n; ++i) {
    p_s[i] = detail::ps_source_power(duals[0], duals[1], duals[2], alpha, ch.h[i],
                                     cfg.peak_power);
    p_r[i] = detail::ps_relay_power(duals[0], duals[2], ch.g[i], cfg.peak_power);
  }
  return {std::move(p_s), std::move(p_r)};
}

inline PsSolution solve_ps(const ChannelRealization& ch, const PsConfig& cfg) {
  cfg.validate();
  return detail::solve_ps_on_grid(ch, cfg, alpha_grid(cfg.alpha_step));
}

// End-to-end rate of a candidate solution, recomputed from its fields.
inline double ps_rate(const PsSolution& s, const ChannelRealization& ch) {
  const int n = ch.size();
  double hop1 = 0.0, hop2 = 0.0;
  for (int i = 0; i < n; ++i) {
    hop1 += std::log1p(s.p_s[i] * ch.h[i] * s.alpha);
    hop2 += std::log1p(s.p_r[i] * ch.g[i]);
  }
  return 0.5 * std::min(hop1, hop2);
}

}  // namespace swiptrelay
