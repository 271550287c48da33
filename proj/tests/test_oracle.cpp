#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include <swiptrelay/channel.hpp>
#include <swiptrelay/oracle.hpp>

using namespace swiptrelay;

namespace {

ChannelRealization make_channel(std::vector<double> h, std::vector<double> g,
                                std::vector<double> f) {
  ChannelRealization ch;
  ch.h = std::move(h);
  ch.g = std::move(g);
  ch.f = std::move(f);
  return ch;
}

ChannelRealization swapped(const ChannelRealization& ch) {
  ChannelRealization out = ch;
  std::swap(out.h[0], out.h[1]);
  std::swap(out.g[0], out.g[1]);
  std::swap(out.f[0], out.f[1]);
  return out;
}

ChannelRealization random_channel(int n, std::uint64_t seed) {
  ChannelParams p;
  p.n_subcarriers = n;
  p.seed = seed;
  if (n < 4) {
    p.tap_powers_db = {0.0, -6.0};
    p.tap_indices = {0, 1};
  }
  return generate(p, Geometry{2.0, 1.0}, 0);
}

}  // namespace

TEST_CASE("zero budget gives zero rate") {
  PsConfig ps_cfg;
  ps_cfg.total_power = 0.0;
  TmaConfig tma_cfg;
  tma_cfg.total_power = 0.0;
  const ChannelRealization ch = random_channel(2, 1);
  REQUIRE(ps_bruteforce(ch, ps_cfg, OracleOptions{}).rate == 0.0);
  REQUIRE(tma_bruteforce(ch, tma_cfg, OracleOptions{}).rate == 0.0);
  REQUIRE(ubps_bruteforce(ch, ps_cfg, OracleOptions{}).rate == 0.0);
}

TEST_CASE("symmetric channels yield a symmetric allocation") {
  PsConfig cfg;
  cfg.total_power = 2.0;
  OracleOptions opt;
  opt.points_per_dim = 201;  // puts the midpoint on the grid
  opt.alpha_step = 1e-2;
  const ChannelRealization ch = make_channel({1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
  const PsOracleResult r = ps_bruteforce(ch, cfg, opt);
  REQUIRE(r.p_s[0] == Catch::Approx(r.p_s[1]).margin(1e-12));
}

TEST_CASE("single-subcarrier splitting optimum is reproduced") {
  // h = g = 4, P = peak = 1: best split balances the hops, rate ln(4.2)/2.
  PsConfig cfg;
  cfg.total_power = 1.0;
  cfg.peak_power = 1.0;
  OracleOptions opt;
  opt.alpha_step = 1e-3;
  const ChannelRealization ch = make_channel({4.0}, {4.0}, {1.0});
  const PsOracleResult r = ps_bruteforce(ch, cfg, opt);
  REQUIRE(r.rate == Catch::Approx(0.5 * std::log(4.2)).epsilon(1e-3));
  REQUIRE(r.alpha == Catch::Approx(0.8).margin(2e-3));
}

TEST_CASE("single-subcarrier mode choice picks the dominant direct link") {
  TmaConfig cfg;
  cfg.total_power = 1.0;
  const ChannelRealization ch = make_channel({1.0}, {1.0}, {4.0});
  const TmaOracleResult r = tma_bruteforce(ch, cfg, OracleOptions{});
  REQUIRE(r.rate == Catch::Approx(std::log(5.0)).margin(1e-9));
  REQUIRE(r.y_d[0] == 1);
}

TEST_CASE("no direct gain means no rate on a single subcarrier") {
  TmaConfig cfg;
  cfg.total_power = 1.0;
  const ChannelRealization ch = make_channel({1.0}, {1.0}, {0.0});
  REQUIRE(tma_bruteforce(ch, cfg, OracleOptions{}).rate == 0.0);
}

TEST_CASE("a second subcarrier can serve as a pure harvester") {
  TmaConfig cfg;
  cfg.total_power = 2.0;
  const ChannelRealization ch = make_channel({1.0, 1.0}, {1.0, 1.0}, {0.0, 0.0});
  const TmaOracleResult r = tma_bruteforce(ch, cfg, OracleOptions{});
  REQUIRE(r.rate == Catch::Approx(0.5 * std::log(2.0)).epsilon(0.02));
}

TEST_CASE("per-subcarrier splitting bound on one subcarrier") {
  // Same instance as the scalar-ratio toy; with N = 1 the two problems
  // coincide and the bisection solves the hop crossing exactly.
  PsConfig cfg;
  cfg.total_power = 1.0;
  cfg.peak_power = 1.0;
  const ChannelRealization ch = make_channel({4.0}, {4.0}, {1.0});
  const UbPsOracleResult r = ubps_bruteforce(ch, cfg, OracleOptions{});
  REQUIRE(r.rate == Catch::Approx(0.5 * std::log(4.2)).margin(1e-6));
}

TEST_CASE("oracle rates are invariant to subcarrier permutation") {
  const ChannelRealization ch = random_channel(2, 12);
  const ChannelRealization sw = swapped(ch);
  OracleOptions opt;
  opt.points_per_dim = 80;
  opt.alpha_step = 1e-2;

  PsConfig ps_cfg;
  ps_cfg.total_power = 3.0;
  REQUIRE(ps_bruteforce(ch, ps_cfg, opt).rate ==
          Catch::Approx(ps_bruteforce(sw, ps_cfg, opt).rate).margin(1e-12));

  TmaConfig tma_cfg;
  tma_cfg.total_power = 3.0;
  REQUIRE(tma_bruteforce(ch, tma_cfg, opt).rate ==
          Catch::Approx(tma_bruteforce(sw, tma_cfg, opt).rate).margin(1e-12));

  REQUIRE(ubps_bruteforce(ch, ps_cfg, opt).rate ==
          Catch::Approx(ubps_bruteforce(sw, ps_cfg, opt).rate).margin(1e-12));
}

TEST_CASE("budget staircase dominates the full grid") {
  // Every rate is nondecreasing in the source powers, so restricting the
  // search to allocations that spend the whole budget cannot lose.
  const ChannelRealization ch = random_channel(2, 13);
  OracleOptions coarse;
  coarse.points_per_dim = 60;
  coarse.alpha_step = 0.02;
  OracleOptions full = coarse;
  full.full_grid = true;

  PsConfig ps_cfg;
  ps_cfg.total_power = 3.0;
  const double stair = ps_bruteforce(ch, ps_cfg, coarse).rate;
  const double grid = ps_bruteforce(ch, ps_cfg, full).rate;
  REQUIRE(stair >= grid - 1e-12);
  REQUIRE(stair <= grid * 1.05 + 1e-12);

  TmaConfig tma_cfg;
  tma_cfg.total_power = 3.0;
  const double tstair = tma_bruteforce(ch, tma_cfg, coarse).rate;
  const double tgrid = tma_bruteforce(ch, tma_cfg, full).rate;
  REQUIRE(tstair >= tgrid - 1e-12);
  REQUIRE(tstair <= tgrid * 1.05 + 1e-12);
}

TEST_CASE("doubling the grid moves the optimum by less than half a percent") {
  const ChannelRealization ch = random_channel(2, 9);
  OracleOptions coarse;
  coarse.points_per_dim = 100;
  coarse.alpha_step = 2e-3;
  OracleOptions fine;
  fine.points_per_dim = 200;
  fine.alpha_step = 1e-3;

  PsConfig ps_cfg;
  ps_cfg.total_power = 3.0;
  const double a = ps_bruteforce(ch, ps_cfg, coarse).rate;
  const double b = ps_bruteforce(ch, ps_cfg, fine).rate;
  REQUIRE(std::abs(a - b) < 0.005 * std::max(a, b));

  TmaConfig tma_cfg;
  tma_cfg.total_power = 3.0;
  const double c = tma_bruteforce(ch, tma_cfg, coarse).rate;
  const double d = tma_bruteforce(ch, tma_cfg, fine).rate;
  REQUIRE(std::abs(c - d) < 0.005 * std::max(c, d));
}

TEST_CASE("instances beyond two subcarriers are rejected") {
  PsConfig ps_cfg;
  TmaConfig tma_cfg;
  const ChannelRealization ch = random_channel(3, 1);
  REQUIRE_THROWS_AS(ps_bruteforce(ch, ps_cfg, OracleOptions{}), ConfigError);
  REQUIRE_THROWS_AS(tma_bruteforce(ch, tma_cfg, OracleOptions{}), ConfigError);
  REQUIRE_THROWS_AS(ubps_bruteforce(ch, ps_cfg, OracleOptions{}), ConfigError);
}

TEST_CASE("grid options are validated") {
  PsConfig cfg;
  const ChannelRealization ch = random_channel(2, 1);
  OracleOptions bad;
  bad.points_per_dim = 1;
  REQUIRE_THROWS_AS(ps_bruteforce(ch, cfg, bad), ConfigError);
  bad = OracleOptions{};
  bad.alpha_step = 0.0;
  REQUIRE_THROWS_AS(ps_bruteforce(ch, cfg, bad), ConfigError);
}
