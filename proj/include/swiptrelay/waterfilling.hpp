#pragma once

// Capped water-filling: maximize sum_i ln(offset_i + p_i * gain_i)
// subject to sum_i p_i <= budget and 0 <= p_i <= cap_i, by bisection on
// the water level w with p_i(w) = clamp(w - offset_i/gain_i, 0, cap_i).
// The lower bisection end is returned, so the budget is never exceeded.

#include <algorithm>
#include <cmath>
#include <vector>

#include "common.hpp"

namespace swiptrelay {

// Rescale a nonnegative power vector so it spends min(budget, n*cap)
// exactly: proportional scaling with per-entry clamping at cap, solved by
// bisection on the scale factor; an all-zero vector is filled uniformly.
// Used by the solution restorations, where every rate is nondecreasing in
// each source power and leaving budget unspent can only lose rate.
inline std::vector<double> scale_to_budget(std::vector<double> p, double cap, double budget) {
  if (p.empty()) return p;
  const double target = std::min(budget, cap * static_cast<double>(p.size()));
  if (target <= 0.0) {
    std::fill(p.begin(), p.end(), 0.0);
    return p;
  }
  double sum = 0.0;
  for (double v : p) sum += v;
  if (sum <= 0.0) {
    std::fill(p.begin(), p.end(), target / static_cast<double>(p.size()));
    return p;
  }
  const auto spent = [&](double s) {
    double t = 0.0;
    for (double v : p) t += std::min(s * v, cap);
    return t;
  };
  double lo = 0.0, hi = 1.0;
  while (spent(hi) < target && hi < 1e12) hi *= 2.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (spent(mid) <= target)
      lo = mid;
    else
      hi = mid;
  }
  for (double& v : p) v = std::min(lo * v, cap);
  return p;
}

inline std::vector<double> capped_waterfill(const std::vector<double>& gains,
                                            const std::vector<double>& caps, double budget,
                                            const std::vector<double>* offsets = nullptr) {
  const std::size_t n = gains.size();
  if (caps.size() != n || (offsets && offsets->size() != n))
    throw ConfigError("waterfill: size mismatch");

  std::vector<double> p(n, 0.0);
  if (n == 0 || !(budget > 0.0)) return p;

  std::vector<double> base(n, 0.0);
  double base_max = 0.0;
  double cap_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (gains[i] > 0.0) {
      base[i] = (offsets ? (*offsets)[i] : 1.0) / gains[i];
      base_max = std::max(base_max, base[i]);
      cap_max = std::max(cap_max, caps[i]);
    }
  }

  auto fill = [&](double w, std::vector<double>& out) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double pi = 0.0;
      if (gains[i] > 0.0) pi = std::clamp(w - base[i], 0.0, caps[i]);
      out[i] = pi;
      total += pi;
    }
    return total;
  };

  double hi = base_max + cap_max + 1.0;
  if (fill(hi, p) <= budget) return p;  // caps bind before the budget does

  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (fill(mid, p) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  fill(lo, p);
  return p;
}

}  // namespace swiptrelay
