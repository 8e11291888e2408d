// SPDX-License-Identifier: Apache-2.0
#include "kronred/feeder_gen.hpp"

#include <cmath>
#include <random>

#include "kronred/errors.hpp"
#include "kronred/grid_model.hpp"

namespace kronred {

namespace {

// deterministic across platforms: uniforms derived directly from mt19937_64
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform() { return double(gen() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }
  int pick(int count) { return int(gen() % std::uint64_t(count)); }
};

PhaseMask child_mask(PhaseMask parent, const GenParams& p, Rng& rng) {
  std::array<int, 3> present{};
  int np = 0;
  for (int ph = 0; ph < 3; ++ph)
    if (parent.has(ph)) present[size_t(np++)] = ph;

  auto pick_subset = [&](int want) {
    PhaseMask m;
    std::array<int, 3> pool = present;
    int avail = np;
    for (int k = 0; k < want; ++k) {
      const int idx = rng.pick(avail);
      m.bits |= std::uint8_t(1u << pool[size_t(idx)]);
      pool[size_t(idx)] = pool[size_t(avail - 1)];
      --avail;
    }
    return m;
  };

  const double u = rng.uniform();
  if (np == 3) {
    if (u < p.frac_single_phase) return pick_subset(1);
    if (u < p.frac_single_phase + p.frac_two_phase) return pick_subset(2);
    return parent;
  }
  if (np == 2) {
    if (u < p.frac_single_phase) return pick_subset(1);
    return parent;
  }
  return parent;
}

Mat3c impedance_block(PhaseMask common, const GenParams& p, Rng& rng) {
  Mat3c z;
  std::array<double, 3> r{}, x{};
  for (int ph = 0; ph < 3; ++ph) {
    if (!common.has(ph)) continue;
    r[size_t(ph)] = rng.uniform(p.self_r_min, p.self_r_max);
    x[size_t(ph)] = p.x_over_r * r[size_t(ph)];
    z(ph, ph) = cx{r[size_t(ph)], x[size_t(ph)]};
  }
  for (int a = 0; a < 3; ++a) {
    if (!common.has(a)) continue;
    for (int b = a + 1; b < 3; ++b) {
      if (!common.has(b)) continue;
      const double rr = 0.5 * (r[size_t(a)] + r[size_t(b)]);
      const double xx = 0.5 * (x[size_t(a)] + x[size_t(b)]);
      cx zm = p.mutual_ratio * rng.uniform(0.5, 1.0) * cx{rr, xx};
      // keep the self real part at least twice the mutual magnitude
      const double cap = 0.5 * std::min(r[size_t(a)], r[size_t(b)]);
      const double mag = std::abs(zm);
      if (mag > cap) zm *= cap / mag;
      z(a, b) = zm;
      z(b, a) = zm;
    }
  }
  return z;
}

}  // namespace

std::pair<Network, ScenarioLibrary> generate(const GenParams& p, GeneratedLoads& loads) {
  if (p.n < 2) throw ConfigError("generator: n must be at least 2");
  if (p.frac_two_phase < 0 || p.frac_single_phase < 0 ||
      p.frac_two_phase + p.frac_single_phase > 1.0)
    throw ConfigError("generator: phase fractions must be non-negative and sum to at most 1");
  if (p.branching < 0 || p.branching > 1) throw ConfigError("generator: branching must be in [0,1]");
  if (!(p.self_r_min > 0) || p.self_r_max < p.self_r_min)
    throw ConfigError("generator: bad self impedance range");
  if (p.load_p_min < 0 || p.load_p_max < p.load_p_min)
    throw ConfigError("generator: bad load range");
  if (p.scenario_count < 1) throw ConfigError("generator: need at least one scenario");
  if (p.scenario_spread < 0 || p.scenario_spread >= 1)
    throw ConfigError("generator: scenario spread must be in [0,1)");

  Rng rng(p.seed);
  Network net;
  net.nodes.reserve(size_t(p.n));

  Node slack;
  slack.id = 0;
  slack.phases = PhaseMask::abc();
  slack.is_slack = true;
  slack.slack_voltage = nominal_slack_voltage();
  net.nodes.push_back(slack);

  for (int i = 1; i < p.n; ++i) {
    const int parent = (i == 1 || rng.uniform() >= p.branching) ? i - 1 : rng.pick(i);
    Node nd;
    nd.id = i;
    nd.phases = child_mask(net.nodes[size_t(parent)].phases, p, rng);
    net.nodes.push_back(nd);

    Branch b;
    b.from = parent;
    b.to = i;
    const PhaseMask common = nd.phases;  // child mask is a subset of the parent mask
    const Mat3c z = impedance_block(common, p, rng);
    Mat3c y;
    double pivot = 0;
    if (!masked_inverse(z, common, y, pivot))
      throw SolverError("generator produced a singular impedance block", pivot, i);
    b.y_series = y;
    net.branches.push_back(b);
  }

  validate_or_throw(net);

  // base loads: every present non-slack node-phase, lagging power factor
  loads.base.clear();
  const double tan_phi = std::tan(std::acos(p.load_pf));
  for (int i = 1; i < p.n; ++i) {
    for (int ph = 0; ph < 3; ++ph) {
      if (!net.nodes[size_t(i)].phases.has(ph)) continue;
      const double pw = rng.uniform(p.load_p_min, p.load_p_max);
      loads.base.push_back({i, ph, cx{pw, pw * tan_phi}});
    }
  }

  loads.scenario_scale.clear();
  for (int l = 0; l < p.scenario_count; ++l) {
    double f;
    if (l == 0)
      f = 1.0 - p.scenario_spread;
    else if (l == 1)
      f = 1.0 + p.scenario_spread;
    else
      f = rng.uniform(1.0 - p.scenario_spread, 1.0 + p.scenario_spread);
    loads.scenario_scale.push_back(f);
  }

  const BlockAdmittance y = assemble_admittance(net);
  const AnchoredSolver solver(y, phase_masks(net), 0, slack.slack_voltage);

  ScenarioLibrary lib;
  lib.n = p.n;
  for (int l = 0; l < p.scenario_count; ++l) {
    std::vector<PqLoad> scaled = loads.base;
    for (PqLoad& ld : scaled) ld.s *= loads.scenario_scale[size_t(l)];
    lib.scenarios.push_back(
        scenario_from_pq(net, solver, scaled, "s" + std::to_string(l)));
  }
  return {std::move(net), std::move(lib)};
}

std::pair<Network, ScenarioLibrary> generate(const GenParams& p) {
  GeneratedLoads loads;
  return generate(p, loads);
}

}  // namespace kronred
