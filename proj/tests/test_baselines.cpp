#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include <swiptrelay/baselines.hpp>
#include <swiptrelay/channel.hpp>

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

TEST_CASE("equal power splitting pins the ratio at one half") {
  PsConfig cfg;
  cfg.total_power = 5.0;
  cfg.alpha_step = 1e-2;
  const ChannelRealization ch = random_channel(4, 5);
  const PsSolution s = solve_eps(ch, cfg);
  REQUIRE(s.alpha == 0.5);
  REQUIRE(s.converged);
  REQUIRE(s.rate > 0.0);

  const PsSolution full = solve_ps(ch, cfg);
  REQUIRE(s.rate <= full.rate + 1e-6);
}

TEST_CASE("equal power splitting with zero budget") {
  PsConfig cfg;
  cfg.total_power = 0.0;
  REQUIRE(solve_eps(random_channel(4, 5), cfg).rate == 0.0);
}

TEST_CASE("equal mode split sends the strongest first-hop gains cooperative") {
  TmaConfig cfg;
  cfg.total_power = 4.0;
  const ChannelRealization ch = make_channel({2.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
  const TmaSolution s = solve_etm(ch, cfg);
  REQUIRE(s.y_c == std::vector<int>{1, 0});
  REQUIRE(s.y_d == std::vector<int>{0, 1});
}

TEST_CASE("index-based assignment variant ignores the gains") {
  TmaConfig cfg;
  cfg.total_power = 4.0;
  const ChannelRealization ch = make_channel({1.0, 2.0, 3.0, 4.0}, {1.0, 1.0, 1.0, 1.0},
                                             {1.0, 1.0, 1.0, 1.0});
  const TmaSolution s = solve_etm(ch, cfg, EtmAssignment::first_half_coop);
  REQUIRE(s.y_c == std::vector<int>{1, 1, 0, 0});
  REQUIRE(s.y_d == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("half the subcarriers are cooperative") {
  TmaConfig cfg;
  cfg.total_power = 10.0;
  const ChannelRealization ch = random_channel(8, 9);
  const TmaSolution s = solve_etm(ch, cfg);
  int coop = 0, direct = 0;
  for (int i = 0; i < 8; ++i) {
    coop += s.y_c[i];
    direct += s.y_d[i];
  }
  REQUIRE(coop == 4);
  REQUIRE(direct == 4);
}

TEST_CASE("fixed assignment never beats the adaptive solver") {
  TmaConfig cfg;
  cfg.total_power = 10.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ChannelRealization ch = random_channel(4, seed);
    REQUIRE(solve_etm(ch, cfg).rate <= solve_tma(ch, cfg).rate + 1e-6);
  }
}

TEST_CASE("odd subcarrier counts are rejected") {
  TmaConfig cfg;
  REQUIRE_THROWS_AS(solve_etm(random_channel(3, 1), cfg), ConfigError);
}
