#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace swiptrelay {

// Invalid user-supplied configuration (bad geometry, tap layout, grids, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown inside an iterative routine.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Per-subcarrier peak power default: 5 dB above unit noise power.
inline constexpr double kDefaultPeakPower = 3.1622776601683795;

inline constexpr double kNatsToBits = 1.4426950408889634;  // 1/ln 2

}  // namespace swiptrelay
