#pragma once

// Exhaustive reference solvers for instances with at most two subcarriers.
// They share no dual machinery with the production solvers; the only
// structural fact they rely on is that every rate expression here is
// nondecreasing in each source power, so the source search can be
// restricted to vectors with no slack (either a peak or the sum budget
// binds on every coordinate).  A full interior grid remains available for
// cross-checking that reduction.

#include <algorithm>
#include <cmath>
#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "ps.hpp"
#include "tma.hpp"
#include "waterfilling.hpp"

namespace swiptrelay {

struct OracleOptions {
  int points_per_dim = 200;
  double alpha_step = 1e-3;  // splitting-ratio grid used by ps_bruteforce
  bool full_grid = false;    // also search interior source combinations
};

struct PsOracleResult {
  double rate = 0.0;  // nats per two-slot frame
  double alpha = 0.0;
  std::vector<double> p_s;
};

struct TmaOracleResult {
  double rate = 0.0;
  std::vector<int> y_c, y_d;
};

struct UbPsOracleResult {
  double rate = 0.0;
  std::vector<double> p_s;
  double info_power = 0.0;  // relay-side power density carrying information
};

namespace detail {

inline void oracle_check(const ChannelRealization& ch, const OracleOptions& opt) {
  ps_validate_channels(ch);
  if (ch.size() > 2)
    throw ConfigError("oracle: exhaustive search is limited to two subcarriers");
  if (opt.points_per_dim < 2) throw ConfigError("oracle: points_per_dim must be >= 2");
  if (!(opt.alpha_step > 0.0) || opt.alpha_step > 1.0)
    throw ConfigError("oracle: alpha_step must be in (0, 1]");
}

inline std::vector<double> oracle_linspace(double hi, int k) {
  std::vector<double> v(k);
  for (int i = 0; i < k; ++i) v[i] = hi * i / (k - 1);
  return v;
}

inline std::vector<double> oracle_alpha_grid(double step) {
  std::vector<double> alphas;
  const long steps = std::lround(1.0 / step);
  for (long i = 0; i < steps; ++i) alphas.push_back(std::min(1.0, i * step));
  alphas.push_back(1.0);
  return alphas;
}

// Source power vectors to search, over `dims` active transmit dimensions.
inline std::vector<std::vector<double>> source_candidates(int dims, double total, double peak,
                                                          const OracleOptions& opt) {
  const double cap = std::min(peak, std::max(0.0, total));
  std::vector<std::vector<double>> out;
  if (dims == 0) {
    out.push_back({});
    return out;
  }
  const std::vector<double> grid = oracle_linspace(cap, opt.points_per_dim);
  if (dims == 1) {
    if (opt.full_grid) {
      for (double v : grid) out.push_back({v});
    } else {
      out.push_back({cap});
    }
    return out;
  }
  if (opt.full_grid) {
    const double slack = total + 1e-12 * std::max(1.0, total);
    for (double v : grid)
      for (double w : grid)
        if (v + w <= slack) out.push_back({v, w});
  } else {
    for (double v : grid) out.push_back({v, std::min(peak, total - v)});
  }
  return out;
}

}  // namespace detail

inline PsOracleResult ps_bruteforce(const ChannelRealization& ch, const PsConfig& cfg,
                                    const OracleOptions& opt = {}) {
  cfg.validate();
  detail::oracle_check(ch, opt);
  const int n = ch.size();
  const std::vector<double> alphas = detail::oracle_alpha_grid(opt.alpha_step);
  const std::vector<double> caps(n, cfg.peak_power);

  PsOracleResult best;
  best.p_s.assign(n, 0.0);
  for (const auto& src : detail::source_candidates(n, cfg.total_power, cfg.peak_power, opt)) {
    double density = 0.0;  // relay-side RF power per unit splitting slack
    for (int i = 0; i < n; ++i) density += src[i] * ch.h[i];
    for (double a : alphas) {
      double hop1 = 0.0;
      for (int i = 0; i < n; ++i) hop1 += std::log1p(src[i] * ch.h[i] * a);
      const std::vector<double> p_r = capped_waterfill(ch.g, caps, (1.0 - a) * density);
      double hop2 = 0.0;
      for (int i = 0; i < n; ++i) hop2 += std::log1p(p_r[i] * ch.g[i]);
      const double rate = 0.5 * std::min(hop1, hop2);
      if (rate > best.rate) {
        best.rate = rate;
        best.alpha = a;
        best.p_s = src;
      }
    }
  }
  return best;
}

inline TmaOracleResult tma_bruteforce(const ChannelRealization& ch, const TmaConfig& cfg,
                                      const OracleOptions& opt = {}) {
  cfg.validate();
  detail::oracle_check(ch, opt);
  const int n = ch.size();

  TmaOracleResult best;
  best.y_c.assign(n, 0);
  best.y_d.assign(n, 0);

  int assignments = 1;
  for (int i = 0; i < n; ++i) assignments *= 3;

  for (int code = 0; code < assignments; ++code) {
    std::vector<int> mode(n);  // 0 idle, 1 cooperative, 2 direct
    int rem = code;
    for (int i = 0; i < n; ++i) {
      mode[i] = rem % 3;
      rem /= 3;
    }
    std::vector<int> active;
    for (int i = 0; i < n; ++i)
      if (mode[i] != 0) active.push_back(i);

    for (const auto& src : detail::source_candidates(static_cast<int>(active.size()),
                                                     cfg.total_power, cfg.peak_power, opt)) {
      std::vector<double> p_sr(n, 0.0), p_sd(n, 0.0);
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (mode[active[k]] == 1)
          p_sr[active[k]] = src[k];
        else
          p_sd[active[k]] = src[k];
      }

      double direct = 0.0, harvest = 0.0;
      std::vector<double> wf_gain(n, 0.0), wf_cap(n, 0.0), wf_off(n, 1.0);
      for (int i = 0; i < n; ++i) {
        if (mode[i] == 2) {
          direct += std::log1p(p_sd[i] * ch.f[i]);
          harvest += p_sd[i] * ch.h[i];
        } else if (mode[i] == 1) {
          wf_gain[i] = ch.g[i];
          wf_cap[i] = cfg.peak_power;
          wf_off[i] = 1.0 + p_sr[i] * ch.f[i];
        }
      }
      const std::vector<double> p_r = capped_waterfill(wf_gain, wf_cap, harvest, &wf_off);

      double hop1 = 0.0, hop2 = 0.0;
      for (int i = 0; i < n; ++i) {
        if (mode[i] != 1) continue;
        hop1 += std::log1p(p_sr[i] * ch.h[i]);
        hop2 += std::log1p(p_r[i] * ch.g[i] + p_sr[i] * ch.f[i]);
      }
      const double rate = direct + 0.5 * std::min(hop1, hop2);
      if (rate > best.rate) {
        best.rate = rate;
        for (int i = 0; i < n; ++i) {
          best.y_c[i] = mode[i] == 1;
          best.y_d[i] = mode[i] == 2;
        }
      }
    }
  }
  return best;
}

// With per-subcarrier ratios the relay-side information powers can be
// treated directly: given source powers, any split of the arriving power
// density between information (e_n <= p_n h_n, first hop sees
// sum ln(1+e_n)) and harvesting (the remainder funds the relay) is
// admissible.  Both hop rates are monotone in the information share, so
// the optimum sits where they cross; that point is found by bisection.
inline UbPsOracleResult ubps_bruteforce(const ChannelRealization& ch, const PsConfig& cfg,
                                        const OracleOptions& opt = {}) {
  cfg.validate();
  detail::oracle_check(ch, opt);
  const int n = ch.size();
  const std::vector<double> ones(n, 1.0);
  const std::vector<double> relay_caps(n, cfg.peak_power);

  UbPsOracleResult best;
  best.p_s.assign(n, 0.0);
  for (const auto& src : detail::source_candidates(n, cfg.total_power, cfg.peak_power, opt)) {
    std::vector<double> density(n);
    double total_density = 0.0;
    for (int i = 0; i < n; ++i) {
      density[i] = src[i] * ch.h[i];
      total_density += density[i];
    }
    if (!(total_density > 0.0)) continue;

    const auto hop1_at = [&](double e_total) {
      const std::vector<double> e = capped_waterfill(ones, density, e_total);
      double r = 0.0;
      for (int i = 0; i < n; ++i) r += std::log1p(e[i]);
      return r;
    };
    const auto hop2_at = [&](double harvest) {
      const std::vector<double> p_r = capped_waterfill(ch.g, relay_caps, harvest);
      double r = 0.0;
      for (int i = 0; i < n; ++i) r += std::log1p(p_r[i] * ch.g[i]);
      return r;
    };

    double lo = 0.0, hi = total_density;
    for (int iter = 0; iter < 100; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (hop1_at(mid) < hop2_at(total_density - mid))
        lo = mid;
      else
        hi = mid;
    }
    const double e_star = 0.5 * (lo + hi);
    const double rate = 0.5 * std::min(hop1_at(e_star), hop2_at(total_density - e_star));
    if (rate > best.rate) {
      best.rate = rate;
      best.p_s = src;
      best.info_power = e_star;
    }
  }
  return best;
}

}  // namespace swiptrelay
