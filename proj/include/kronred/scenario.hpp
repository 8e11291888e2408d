// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "kronred/network.hpp"
#include "kronred/solver.hpp"

namespace kronred {

/// One consistent operating point: complex nodal current injections and the
/// matching full-network voltage solution. Injections are zero at absent
/// phases and at the slack (which absorbs the mismatch).
struct Scenario {
  std::string id;
  std::vector<cx> injections;  // 3n
  std::vector<cx> voltages;    // 3n
};

/// Ordered scenario set over one fixed network.
struct ScenarioLibrary {
  int n = 0;  // node count of the underlying network
  std::vector<Scenario> scenarios;

  int size() const { return int(scenarios.size()); }
  std::vector<std::string> ids() const {
    std::vector<std::string> r;
    r.reserve(scenarios.size());
    for (const Scenario& s : scenarios) r.push_back(s.id);
    return r;
  }
};

/// Complex power drawn at one node-phase (positive = consumption).
struct PqLoad {
  int node = -1;
  int phase = -1;
  cx s;
};

/// Solver tolerances for scenario construction.
struct ScenarioTolerances {
  double residual = 1e-10;   // relative residual bound for consistency checks
  double pq_fixed_point = 1e-9;
  int pq_max_iter = 50;
};

/// Fixed-point constant-PQ solve: I <- -conj(S/V), V <- anchored solve, until
/// the voltage update stalls below tolerance. Loads at absent phases or at the
/// slack are rejected.
Scenario scenario_from_pq(const Network& net, const AnchoredSolver& solver,
                          const std::vector<PqLoad>& loads, std::string id,
                          const ScenarioTolerances& tol = {});

/// Scenario from raw current injections (taken as-is, slack entries zeroed).
Scenario scenario_from_currents(const Network& net, const AnchoredSolver& solver,
                                std::vector<cx> injections, std::string id,
                                const ScenarioTolerances& tol = {});

/// Load the scenario CSV (constant-PQ or constant-current mode, chosen by
/// header), solve every scenario and verify the residual invariant.
ScenarioLibrary load_library(const Network& net, const std::string& path,
                             const ScenarioTolerances& tol = {});

/// Residual check used by the library invariants:
/// max |(Y V - I)| over non-slack present-phase rows <= tol * max(1, |I|_inf).
bool scenario_consistent(const BlockMatrix& y, const std::vector<PhaseMask>& phases,
                         int slack, const Scenario& sc, double tol = 1e-10);

}  // namespace kronred
