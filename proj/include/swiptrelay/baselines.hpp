#pragma once

// Reference schemes the adaptive protocols are measured against:
//   EPS - power splitting with the ratio pinned at 1/2 (powers still
//         optimized by the same dual machinery)
//   ETM - transmission modes fixed up front (half the subcarriers
//         cooperative, half direct), powers optimized with the pattern
//         frozen

#include <algorithm>
#include <numeric>
#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "ps.hpp"
#include "tma.hpp"

namespace swiptrelay {

inline PsSolution solve_eps(const ChannelRealization& ch, const PsConfig& cfg) {
  cfg.validate();
  detail::ps_validate_channels(ch);
  return detail::solve_ps_on_grid(ch, cfg, {0.5});
}

enum class EtmAssignment {
  largest_gain_coop,  // N/2 strongest source-relay gains cooperate
  first_half_coop,    // subcarriers 0..N/2-1 cooperate
};

inline TmaSolution solve_etm(const ChannelRealization& ch, const TmaConfig& cfg,
                             EtmAssignment assignment = EtmAssignment::largest_gain_coop) {
  cfg.validate();
  detail::ps_validate_channels(ch);
  const int n = ch.size();
  if (n % 2 != 0) throw ConfigError("etm: subcarrier count must be even");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (assignment == EtmAssignment::largest_gain_coop) {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ch.h[a] > ch.h[b]; });
  }

  std::vector<int> y_c(n, 0), y_d(n, 0);
  for (int k = 0; k < n; ++k) {
    if (k < n / 2)
      y_c[order[k]] = 1;
    else
      y_d[order[k]] = 1;
  }
  return solve_tma_with_modes(ch, cfg, y_c, y_d);
}

}  // namespace swiptrelay
