#pragma once

// Ellipsoid method for non-smooth convex minimization over a box.
//
// State is a center x and a shape matrix P (the ellipsoid is
// {z : (z-x)' P^-1 (z-x) <= 1}).  Box violations produce feasibility
// cuts, so the objective callback only ever sees feasible points.
// Central-cut update with cut vector g:
//   x  <- x - 1/(q+1) * P g / sqrt(g'Pg)
//   P  <- q^2/(q^2-1) * (P - 2/(q+1) * (P g)(P g)' / (g'Pg))
// q = 1 degenerates to interval bisection and is handled as such.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace swiptrelay {

// A point in multiplier space together with its box.
struct DualPoint {
  std::vector<double> values;
  std::vector<double> box_lo;
  std::vector<double> box_hi;  // +inf for one-sided coordinates
};

struct EllipsoidOptions {
  double tol = 1e-5;       // stop once sqrt(g'Pg) <= tol
  long max_iter = 0;       // 0 -> 2000 * q^2
  // Optional per-iteration trace: (iteration, best value so far, sqrt(g'Pg)).
  std::function<void(long, double, double)> trace;
};

struct EllipsoidResult {
  DualPoint best;
  double best_value = std::numeric_limits<double>::infinity();
  bool converged = false;
  long iterations = 0;
};

// Objective callback: value and a subgradient at a feasible point.
using ConvexEval =
    std::function<std::pair<double, std::vector<double>>(const std::vector<double>&)>;

namespace detail {

inline std::vector<double> project_to_box(std::vector<double> x, const std::vector<double>& lo,
                                          const std::vector<double>& hi) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo[i]) x[i] = lo[i];
    if (x[i] > hi[i]) x[i] = hi[i];
  }
  return x;
}

}  // namespace detail

inline EllipsoidResult ellipsoid_minimize(const ConvexEval& eval, std::vector<double> box_lo,
                                          std::vector<double> box_hi,
                                          std::vector<double> init_center, double init_radius,
                                          const EllipsoidOptions& opt = {}) {
  const std::size_t q = init_center.size();
  if (q == 0 || box_lo.size() != q || box_hi.size() != q)
    throw ConfigError("ellipsoid: box and center dimensions disagree");
  for (std::size_t i = 0; i < q; ++i)
    if (!(box_lo[i] <= box_hi[i])) throw ConfigError("ellipsoid: empty box");
  if (!(init_radius > 0.0)) throw ConfigError("ellipsoid: init_radius must be > 0");

  const long max_iter =
      opt.max_iter > 0 ? opt.max_iter : 2000L * static_cast<long>(q) * static_cast<long>(q);

  EllipsoidResult res;
  res.best.box_lo = box_lo;
  res.best.box_hi = box_hi;

  // Seed the incumbent with the projected start so a usable feasible point
  // always exists, whatever the cut sequence does.
  {
    std::vector<double> x0 = detail::project_to_box(init_center, box_lo, box_hi);
    auto [v0, g0] = eval(x0);
    if (!std::isfinite(v0)) throw NumericError("ellipsoid: non-finite objective at start");
    res.best.values = std::move(x0);
    res.best_value = v0;
    if (g0.size() != q) throw ConfigError("ellipsoid: subgradient dimension mismatch");
    bool zero = true;
    for (double gi : g0) zero = zero && gi == 0.0;
    if (zero) {
      res.converged = true;
      return res;
    }
  }

  std::vector<double> x = std::move(init_center);
  std::vector<double> shape(q * q, 0.0);  // row-major P
  for (std::size_t i = 0; i < q; ++i) shape[i * q + i] = init_radius * init_radius;

  std::vector<double> cut(q), pg(q);

  for (long iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;

    // Feasibility cut first, objective cut otherwise.
    std::size_t violated = q;
    for (std::size_t i = 0; i < q; ++i) {
      if (x[i] < box_lo[i] || x[i] > box_hi[i]) {
        violated = i;
        break;
      }
    }
    if (violated < q) {
      for (std::size_t i = 0; i < q; ++i) cut[i] = 0.0;
      cut[violated] = x[violated] < box_lo[violated] ? -1.0 : 1.0;
    } else {
      auto [v, g] = eval(x);
      if (!std::isfinite(v))
        throw NumericError("ellipsoid: non-finite objective at iteration " +
                           std::to_string(iter));
      if (g.size() != q) throw ConfigError("ellipsoid: subgradient dimension mismatch");
      if (v < res.best_value) {
        res.best_value = v;
        res.best.values = x;
      }
      bool zero = true;
      for (std::size_t i = 0; i < q; ++i) {
        cut[i] = g[i];
        zero = zero && g[i] == 0.0;
      }
      if (zero) {  // subgradient 0: exact minimizer
        res.converged = true;
        return res;
      }
    }

    // pg = P * cut, gpg = cut' P cut
    double gpg = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < q; ++j) acc += shape[i * q + j] * cut[j];
      pg[i] = acc;
      gpg += acc * cut[i];
    }
    if (!std::isfinite(gpg) || gpg <= 0.0)
      throw NumericError("ellipsoid: shape matrix lost positive definiteness at iteration " +
                         std::to_string(iter));

    const double gnorm = std::sqrt(gpg);
    if (opt.trace) opt.trace(iter, res.best_value, gnorm);
    if (gnorm <= opt.tol) {
      res.converged = true;
      return res;
    }

    if (q == 1) {  // interval bisection
      const double radius = std::sqrt(shape[0]);
      x[0] -= (cut[0] > 0.0 ? 1.0 : -1.0) * radius / 2.0;
      shape[0] = (radius / 2.0) * (radius / 2.0);
      continue;
    }

    const double dq = static_cast<double>(q);
    const double step = 1.0 / ((dq + 1.0) * gnorm);
    for (std::size_t i = 0; i < q; ++i) x[i] -= step * pg[i];

    const double scale = dq * dq / (dq * dq - 1.0);
    const double rank1 = 2.0 / ((dq + 1.0) * gpg);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j)
        shape[i * q + j] = scale * (shape[i * q + j] - rank1 * pg[i] * pg[j]);

    // Resymmetrize to keep rounding from accumulating.
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = i + 1; j < q; ++j) {
        const double avg = 0.5 * (shape[i * q + j] + shape[j * q + i]);
        shape[i * q + j] = avg;
        shape[j * q + i] = avg;
      }
    }
  }

  res.converged = false;  // max_iter exhausted; best incumbent still returned
  return res;
}

}  // namespace swiptrelay
