#pragma once

// Three-node frequency-selective channel generator.
//
// Per-subcarrier power gain = pathloss(distance) * lognormal shadowing *
// |H_n|^2, where H_n is the N-point frequency response of a tapped delay
// line with complex Gaussian taps.  Tap powers are normalized so the
// expected small-scale gain per subcarrier is 1; noise power is 1
// everywhere, so p * gain is an SNR directly.
//
// Draws are counter-based: every (seed, realization index, link) triple
// seeds its own generator, so realizations can be produced in any order,
// in parallel, with identical results.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "common.hpp"

namespace swiptrelay {

struct Geometry {
  double sd_distance = 2.0;  // source -> destination
  double sr_distance = 1.0;  // source -> relay, on the S-D line

  double rd_distance() const { return sd_distance - sr_distance; }

  void validate() const {
    if (!(sd_distance > 0.0))
      throw ConfigError("geometry: sd_distance must be > 0");
    if (!(sr_distance > 0.0) || !(sr_distance < sd_distance))
      throw ConfigError("geometry: relay must lie strictly between source and destination");
  }
};

struct ChannelParams {
  int n_subcarriers = 64;
  double pathloss_exponent = 3.5;
  double shadowing_sigma_db = 5.8;       // 0 disables shadowing
  std::vector<double> tap_powers_db{0.0, -10.0, -14.0};
  std::vector<int> tap_indices{0, 2, 3};  // sample offsets on the FFT grid
  std::uint64_t seed = 1;

  void validate() const {
    if (n_subcarriers < 1) throw ConfigError("channel: n_subcarriers must be >= 1");
    if (!(pathloss_exponent > 0.0)) throw ConfigError("channel: pathloss_exponent must be > 0");
    if (!(shadowing_sigma_db >= 0.0)) throw ConfigError("channel: shadowing_sigma_db must be >= 0");
    if (tap_powers_db.empty() || tap_powers_db.size() != tap_indices.size())
      throw ConfigError("channel: tap_powers_db and tap_indices must be non-empty and equal length");
    for (int idx : tap_indices)
      if (idx < 0 || idx >= n_subcarriers)
        throw ConfigError("channel: tap index outside [0, n_subcarriers)");
  }
};

// Per-subcarrier power gains of one realization.
struct ChannelRealization {
  std::vector<double> h;  // source -> relay
  std::vector<double> g;  // relay -> destination
  std::vector<double> f;  // source -> destination

  int size() const { return static_cast<int>(h.size()); }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t realization,
                                    std::uint64_t link) {
  std::uint64_t s = splitmix64(seed + 0x9e3779b97f4a7c15ULL * (realization + 1));
  return splitmix64(s + 0x9e3779b97f4a7c15ULL * (link + 1));
}

// Box-Muller normals on top of mt19937_64.  std::normal_distribution is
// implementation-defined; this stays bit-stable across toolchains.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double uniform01() {  // (0, 1], so log() above is safe
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// One link: gains for all subcarriers.
inline std::vector<double> generate_link(const ChannelParams& p, double distance,
                                         std::uint64_t realization, std::uint64_t link) {
  GaussianStream rng(substream_seed(p.seed, realization, link));

  const double pathloss = std::pow(distance, -p.pathloss_exponent);
  const double shadow_db = p.shadowing_sigma_db * rng.next();
  const double shadowing = std::pow(10.0, shadow_db / 10.0);

  const std::size_t taps = p.tap_powers_db.size();
  double power_sum = 0.0;
  std::vector<double> tap_power(taps);
  for (std::size_t k = 0; k < taps; ++k) {
    tap_power[k] = std::pow(10.0, p.tap_powers_db[k] / 10.0);
    power_sum += tap_power[k];
  }

  std::vector<std::complex<double>> tap(taps);
  for (std::size_t k = 0; k < taps; ++k) {
    const double s = std::sqrt(tap_power[k] / power_sum / 2.0);
    const double re = s * rng.next();
    const double im = s * rng.next();
    tap[k] = {re, im};
  }

  const int n = p.n_subcarriers;
  std::vector<double> gain(n);
  for (int sc = 0; sc < n; ++sc) {
    std::complex<double> resp{0.0, 0.0};
    for (std::size_t k = 0; k < taps; ++k) {
      const double phase = -2.0 * 3.141592653589793238462643383279502884 *
                           static_cast<double>(sc) * static_cast<double>(p.tap_indices[k]) /
                           static_cast<double>(n);
      resp += tap[k] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    gain[sc] = pathloss * shadowing * std::norm(resp);
  }
  return gain;
}

}  // namespace detail

inline ChannelRealization generate(const ChannelParams& params, const Geometry& geom,
                                   std::uint64_t realization_index) {
  params.validate();
  geom.validate();
  ChannelRealization ch;
  ch.h = detail::generate_link(params, geom.sr_distance, realization_index, 0);
  ch.g = detail::generate_link(params, geom.rd_distance(), realization_index, 1);
  ch.f = detail::generate_link(params, geom.sd_distance, realization_index, 2);
  return ch;
}

}  // namespace swiptrelay
