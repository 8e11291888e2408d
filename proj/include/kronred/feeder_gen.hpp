// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kronred/network.hpp"
#include "kronred/scenario.hpp"

namespace kronred {

/// Knobs for the deterministic synthetic feeder generator. Defaults produce a
/// mixed-phase feeder whose full-length voltage drop is a few percent, so the
/// interesting error-bound range is roughly 1e-4 .. 1e-2 p.u.
struct GenParams {
  int n = 100;
  std::uint64_t seed = 1;
  double branching = 0.25;         // chance a new node attaches off the current frontier
  double frac_two_phase = 0.15;    // lateral fractions; remainder stays three-phase
  double frac_single_phase = 0.15;
  double self_r_min = 0.0004;      // series self impedance ranges, p.u.
  double self_r_max = 0.0030;
  double x_over_r = 2.0;
  double mutual_ratio = 0.35;      // mutual = ratio * self (keeps blocks dominant)
  double load_p_min = 0.1e-3;      // per node-phase active power draw, p.u.
  double load_p_max = 1.2e-3;
  double load_pf = 0.92;           // lagging power factor of every load
  int scenario_count = 2;
  double scenario_spread = 0.4;    // scenarios scale base loads in [1-s, 1+s]
};

/// Random radial three-phase feeder rooted at a three-phase slack, with
/// monotone phase masks, symmetric impedance blocks and a consistent scenario
/// library (first two scenarios are the extreme loadings). Bit-identical for
/// equal parameters.
std::pair<Network, ScenarioLibrary> generate(const GenParams& params);

/// The per node-phase base loads behind the generated library, for writing
/// scenario CSVs: one entry per loaded node-phase.
struct GeneratedLoads {
  std::vector<PqLoad> base;
  std::vector<double> scenario_scale;  // one factor per scenario
};

/// Same generation, also exposing the load table.
std::pair<Network, ScenarioLibrary> generate(const GenParams& params, GeneratedLoads& loads);

}  // namespace kronred
