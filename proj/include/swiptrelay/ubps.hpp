#pragma once

// Per-subcarrier splitting-ratio relaxation of the power-splitting
// protocol: every subcarrier carries its own ratio a_n, which upper-bounds
// the single-ratio problem.  The inner maximizer is closed-form in three
// regimes per subcarrier:
//   1. lambda <= 2 nu             -> a_n = 0 (pure harvesting), mask power
//                                    if nu h_n >= mu, zero otherwise
//   2. lambda >  2 nu, small peak -> a_n = 1 (pure information),
//                                    water-filled source power
//   3. lambda >  2 nu, otherwise  -> interior split a_n = (lambda - 2 nu)
//                                    / (2 nu peak h_n) at mask power,
//                                    zero power if nu h_n < mu

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "ellipsoid.hpp"
#include "ps.hpp"
#include "waterfilling.hpp"

namespace swiptrelay {

struct UbPsSolution {
  std::vector<double> p_s;
  std::vector<double> p_r;
  std::vector<double> alpha;  // per-subcarrier ratios
  double rate_hop1 = 0.0;     // nats per two-slot frame
  double rate_hop2 = 0.0;
  double rate = 0.0;
  DualPoint duals;  // (lambda, mu, nu)
  bool converged = false;
};

struct Prop4Result {
  double p_s = 0.0;
  double alpha = 0.0;
  double p_r = 0.0;
  int case_id = 0;  // 1/2/3 as above; negative when the zero-power branch fires
};

inline Prop4Result prop4_per_subcarrier(const std::array<double, 3>& duals, double h, double g,
                                        double peak) {
  const double lambda = duals[0], mu = duals[1], nu = duals[2];
  Prop4Result r;
  r.p_r = detail::ps_relay_power(lambda, nu, g, peak);

  if (lambda <= 2.0 * nu) {
    r.alpha = 0.0;
    if (nu * h >= mu) {
      r.p_s = peak;
      r.case_id = 1;
    } else {
      r.p_s = 0.0;
      r.case_id = -1;
    }
    return r;
  }

  if (2.0 * nu * peak * h <= lambda - 2.0 * nu) {
    r.alpha = 1.0;
    r.case_id = 2;
    if (mu <= 0.0) {
      r.p_s = peak;
    } else if (h <= 0.0) {
      r.p_s = 0.0;
    } else {
      r.p_s = std::clamp(lambda / (2.0 * mu) - 1.0 / h, 0.0, peak);
    }
    return r;
  }

  if (nu * h >= mu) {  // nu > 0 here, so the interior ratio is well defined
    r.alpha = (lambda - 2.0 * nu) / (2.0 * nu * peak * h);
    r.p_s = peak;
    r.case_id = 3;
  } else {
    r.alpha = 0.0;
    r.p_s = 0.0;
    r.case_id = -3;
  }
  return r;
}

namespace detail {

struct UbPsDualInfo {
  double value = 0.0;
  std::array<double, 3> subgrad{};
};

inline UbPsDualInfo ubps_dual_point(const ChannelRealization& ch, const PsConfig& cfg,
                                    const std::vector<double>& duals) {
  const double lambda = duals[0], mu = duals[1], nu = duals[2];
  const int n = ch.size();
  const std::array<double, 3> d{lambda, mu, nu};

  double value = mu * cfg.total_power;
  double hop1 = 0.0, hop2 = 0.0, sum_ps = 0.0, sum_pr = 0.0, harvest = 0.0;
  for (int i = 0; i < n; ++i) {
    const Prop4Result pw = prop4_per_subcarrier(d, ch.h[i], ch.g[i], cfg.peak_power);
    const double info_snr = pw.p_s * ch.h[i] * pw.alpha;
    const double l1 = info_snr > 0.0 ? std::log1p(info_snr) : 0.0;
    const double l2 = std::log1p(pw.p_r * ch.g[i]);
    hop1 += l1;
    hop2 += l2;
    sum_ps += pw.p_s;
    sum_pr += pw.p_r;
    harvest += pw.p_s * ch.h[i] * (1.0 - pw.alpha);
    value += lambda / 2.0 * l1 - pw.p_s * (mu - nu * ch.h[i] * (1.0 - pw.alpha));
    value += (1.0 - lambda) / 2.0 * l2 - nu * pw.p_r;
  }

  UbPsDualInfo info;
  info.value = value;
  info.subgrad = {0.5 * hop1 - 0.5 * hop2, cfg.total_power - sum_ps, harvest - sum_pr};
  return info;
}

struct UbPsSplit {
  std::vector<double> alpha, p_r, info;
  double hop1 = 0.0, hop2 = 0.0, rate = 0.0;
};

// Exact completion of a fixed source allocation: the arriving power
// sum_i p_i h_i is divided between decoding and harvesting by bisecting
// the crossing of the two hop rates.  Each side is a capped water-fill
// (the decoder share spreads evenly up to the per-subcarrier arrivals,
// the relay fills against its masks), so for the given sources the
// completion is the true optimum of the remaining problem.
inline UbPsSplit ubps_complete(const ChannelRealization& ch, const PsConfig& cfg,
                               const std::vector<double>& p_s) {
  const int n = ch.size();
  UbPsSplit out;
  out.alpha.assign(n, 0.0);
  out.p_r.assign(n, 0.0);
  out.info.assign(n, 0.0);

  std::vector<double> density(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    density[i] = p_s[i] * ch.h[i];
    total += density[i];
  }
  if (total <= 0.0) return out;

  const std::vector<double> ones(n, 1.0);
  const std::vector<double> caps(n, cfg.peak_power);
  const auto hop1_at = [&](double e_total) {
    out.info = capped_waterfill(ones, density, e_total);
    double r = 0.0;
    for (double e : out.info) r += std::log1p(e);
    return r;
  };
  const auto hop2_at = [&](double harvest) {
    out.p_r = capped_waterfill(ch.g, caps, harvest);
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += std::log1p(out.p_r[i] * ch.g[i]);
    return r;
  };

  double lo = 0.0, hi = total;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hop1_at(mid) < hop2_at(total - mid))
      lo = mid;
    else
      hi = mid;
  }
  double used = 0.0;
  out.hop1 = 0.5 * hop1_at(0.5 * (lo + hi));
  for (int i = 0; i < n; ++i) {
    if (density[i] > 0.0) out.alpha[i] = std::min(1.0, out.info[i] / density[i]);
    used += out.info[i];
  }
  out.hop2 = 0.5 * hop2_at(total - used);
  out.rate = std::min(out.hop1, out.hop2);
  return out;
}

}  // namespace detail

inline UbPsSolution solve_ubps(const ChannelRealization& ch, const PsConfig& cfg) {
  cfg.validate();
  detail::ps_validate_channels(ch);
  const int n = ch.size();

  UbPsSolution sol;
  if (cfg.total_power <= 0.0) {
    const PsSolution z = detail::ps_zero_solution(n);
    sol.p_s = z.p_s;
    sol.p_r = z.p_r;
    sol.alpha.assign(n, 0.0);
    sol.duals = z.duals;
    sol.converged = true;
    return sol;
  }

  const double inf = std::numeric_limits<double>::infinity();
  ConvexEval eval = [&](const std::vector<double>& x) {
    const detail::UbPsDualInfo info = detail::ubps_dual_point(ch, cfg, x);
    return std::make_pair(info.value,
                          std::vector<double>(info.subgrad.begin(), info.subgrad.end()));
  };

  const double radius = 10.0 * std::max(1.0, cfg.total_power);
  const EllipsoidResult res = ellipsoid_minimize(eval, {0.0, 0.0, 0.0}, {1.0, inf, inf},
                                                 {0.5, 1.0, 1.0}, radius, cfg.ellipsoid);

  // Restoration: the final multipliers pin the per-subcarrier powers only
  // up to a case boundary, so several structured source allocations
  // compete and each is completed by the exact split of its arriving
  // power between decoding and harvesting.  The single-ratio solution is
  // one of the candidates; its completion can only improve on it, which
  // keeps the relaxation above the protocol it bounds.
  const std::array<double, 3> d{res.best.values[0], res.best.values[1], res.best.values[2]};
  std::vector<std::vector<double>> sources;
  {
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i)
      p[i] = prop4_per_subcarrier(d, ch.h[i], ch.g[i], cfg.peak_power).p_s;
    sources.push_back(scale_to_budget(std::move(p), cfg.peak_power, cfg.total_power));
  }
  sources.push_back(detail::solve_ps_on_grid(ch, cfg, alpha_grid(cfg.alpha_step)).p_s);
  sources.push_back(
      scale_to_budget(std::vector<double>(n, 1.0), cfg.peak_power, cfg.total_power));
  {
    std::vector<int> order(n);  // strongest arrivals first, filled to the mask
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ch.h[a] > ch.h[b]; });
    std::vector<double> p(n, 0.0);
    double left = cfg.total_power;
    for (int i : order) {
      p[i] = std::min(cfg.peak_power, left);
      left -= p[i];
      if (left <= 0.0) break;
    }
    sources.push_back(std::move(p));
  }

  detail::UbPsSplit best;
  double best_rate = -1.0;
  for (auto& p : sources) {
    detail::UbPsSplit cand = detail::ubps_complete(ch, cfg, p);
    if (cand.rate > best_rate) {
      best_rate = cand.rate;
      best = std::move(cand);
      sol.p_s = std::move(p);
    }
  }
  sol.alpha = std::move(best.alpha);
  sol.p_r = std::move(best.p_r);
  sol.rate_hop1 = best.hop1;
  sol.rate_hop2 = best.hop2;
  sol.rate = best.rate;
  sol.duals = res.best;
  sol.converged = res.converged;
  return sol;
}

}  // namespace swiptrelay
