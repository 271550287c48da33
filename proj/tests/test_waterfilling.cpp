#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <swiptrelay/waterfilling.hpp>

using namespace swiptrelay;

namespace {

double objective(const std::vector<double>& p, const std::vector<double>& gains,
                 const std::vector<double>* offsets) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double off = offsets ? (*offsets)[i] : 1.0;
    s += std::log(off + p[i] * gains[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("two-channel fill matches the hand-solved water level") {
  // gains (4, 1), caps 1, budget 0.8: level w = 1.025 gives p = (0.775, 0.025).
  const std::vector<double> p = capped_waterfill({4.0, 1.0}, {1.0, 1.0}, 0.8);
  REQUIRE(p[0] == Catch::Approx(0.775).margin(1e-9));
  REQUIRE(p[1] == Catch::Approx(0.025).margin(1e-9));
}

TEST_CASE("budget and caps are always respected") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<double> gains(n), caps(n);
    for (int i = 0; i < n; ++i) {
      gains[i] = u(rng);
      caps[i] = 0.1 + u(rng);
    }
    const double budget = u(rng);
    const std::vector<double> p = capped_waterfill(gains, caps, budget);
    double spent = 0.0;
    for (int i = 0; i < n; ++i) {
      REQUIRE(p[i] >= 0.0);
      REQUIRE(p[i] <= caps[i] + 1e-12);
      spent += p[i];
    }
    REQUIRE(spent <= budget + 1e-9 * std::max(1.0, budget));
  }
}

TEST_CASE("allocation beats a brute-force grid") {
  const std::vector<double> gains{2.5, 0.7};
  const std::vector<double> caps{1.2, 1.2};
  const double budget = 1.0;
  const std::vector<double> p = capped_waterfill(gains, caps, budget);
  const double val = objective(p, gains, nullptr);
  const int k = 400;
  for (int i = 0; i <= k; ++i) {
    const double a = budget * i / k;
    const double b = std::min(caps[1], budget - a);
    if (a > caps[0]) continue;
    REQUIRE(val >= objective({a, b}, gains, nullptr) - 1e-9);
  }
}

TEST_CASE("interior allocations equalize marginal utility") {
  const std::vector<double> gains{1.0, 1.0};
  const std::vector<double> offsets{2.0, 1.0};
  const std::vector<double> p = capped_waterfill(gains, {10.0, 10.0}, 3.0, &offsets);
  REQUIRE(p[0] + p[1] == Catch::Approx(3.0).margin(1e-9));
  const double m0 = gains[0] / (offsets[0] + p[0] * gains[0]);
  const double m1 = gains[1] / (offsets[1] + p[1] * gains[1]);
  REQUIRE(m0 == Catch::Approx(m1).margin(1e-9));
}

TEST_CASE("degenerate inputs") {
  REQUIRE(capped_waterfill({1.0, 2.0}, {1.0, 1.0}, 0.0) ==
          std::vector<double>{0.0, 0.0});
  REQUIRE(capped_waterfill({0.0, 0.0}, {1.0, 1.0}, 5.0) ==
          std::vector<double>{0.0, 0.0});
  REQUIRE(capped_waterfill({}, {}, 1.0).empty());

  // Budget beyond the caps saturates every positive-gain channel.
  const std::vector<double> p = capped_waterfill({1.0, 3.0}, {0.5, 0.7}, 10.0);
  REQUIRE(p[0] == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(p[1] == Catch::Approx(0.7).margin(1e-9));
}

TEST_CASE("proportional rescaling hits the budget") {
  SECTION("scales down") {
    const std::vector<double> p = scale_to_budget({2.0, 2.0}, 3.0, 2.0);
    REQUIRE(p[0] == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(p[1] == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("scales up around a binding cap") {
    // s = 10 saturates the first entry at the cap and fills the remainder.
    const std::vector<double> p = scale_to_budget({1.0, 0.1}, 1.5, 2.5);
    REQUIRE(p[0] == Catch::Approx(1.5).margin(1e-9));
    REQUIRE(p[1] == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("fills an all-zero vector uniformly") {
    const std::vector<double> p = scale_to_budget({0.0, 0.0}, 1.0, 1.5);
    REQUIRE(p[0] == Catch::Approx(0.75).margin(1e-9));
    REQUIRE(p[1] == Catch::Approx(0.75).margin(1e-9));
  }
  SECTION("budget above the caps saturates") {
    const std::vector<double> p = scale_to_budget({0.3, 0.1}, 1.0, 99.0);
    REQUIRE(p[0] == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(p[1] == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("zero or negative budget clears the vector") {
    REQUIRE(scale_to_budget({0.5, 0.5}, 1.0, 0.0) == std::vector<double>{0.0, 0.0});
    REQUIRE(scale_to_budget({0.5, 0.5}, 1.0, -1.0) == std::vector<double>{0.0, 0.0});
  }
  SECTION("spend equals the budget whenever it fits under the caps") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> p(3);
      for (double& v : p) v = u(rng);
      const double cap = 1.0 + u(rng);
      const double budget = u(rng);
      const std::vector<double> q = scale_to_budget(p, cap, budget);
      const double target = std::min(budget, 3.0 * cap);
      double spent = 0.0;
      for (double v : q) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= cap + 1e-12);
        spent += v;
      }
      REQUIRE(spent == Catch::Approx(target).margin(1e-8 * std::max(1.0, target)));
    }
  }
}
