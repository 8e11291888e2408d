// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kronred/kernels.hpp"
#include "kronred/kron.hpp"
#include "kronred/network.hpp"
#include "kronred/scenario.hpp"

namespace kronred {

enum class Objective { magnitude, complex_error };

struct ReductionConfig {
  double e_bar = 1e-3;                     // node-phase voltage magnitude bound
  Objective objective = Objective::magnitude;
  std::optional<double> target_reduction;  // stop once (n - supernodes)/n reaches this
  int workers = 1;
  bool use_delta = true;                   // sensitivity-column fast path
  double topology_tol = 1e-9;
};

/// One proposed move: super-node r (never the slack) absorbed into adjacent
/// super-node s, feasible only when phi(r) is a subset of phi(s).
struct Candidate {
  int s = -1;
  int r = -1;
};

struct CandidateScore {
  double smice = 0;               // +inf when infeasible
  std::vector<double> max_err;    // per scenario, max node-phase magnitude error
  bool feasible = false;
};

/// The evolving assignment: every node maps to exactly one super-node,
/// clusters stay connected in the original graph, the super-node adjacency
/// shrinks edge by edge, and aggregated injections follow the assignment.
struct AssignmentState {
  int n = 0;
  int slack = -1;
  std::vector<int> sup;                   // current super-node of each node
  std::vector<std::vector<int>> members;  // per super-node id: its cluster (incl. itself)
  std::vector<int> supernodes;            // active super-node ids, ascending
  std::vector<std::vector<int>> lambda;   // sorted super-node neighbor lists
  std::vector<std::vector<cx>> i_agg;     // per scenario, 3n aggregated injections

  int supernode_count() const { return int(supernodes.size()); }
  double reduction_fraction() const {
    return n == 0 ? 0.0 : double(n - supernode_count()) / double(n);
  }
  /// Assignment pair set S = {(sup(j), j)}.
  std::vector<std::pair<int, int>> assignment_pairs() const;
  /// Dense boolean assignment matrix A, row-major n*n (tests only).
  std::vector<std::uint8_t> assignment_matrix() const;
};

AssignmentState init_state(const Network& net, const ScenarioLibrary& lib);

/// Both directions of every current super-node edge, minus slack-as-absorbed
/// and phase-infeasible moves, in lexicographic (s, r) order.
std::vector<Candidate> enumerate_candidates(const AssignmentState& state, const Network& net);

/// Shared read-only evaluation data for the fast path: per-scenario base
/// solutions for the current aggregated injections, reference voltage
/// magnitudes, and lazily built unit-injection response columns.
class DeltaCache {
 public:
  DeltaCache(const ScenarioLibrary& lib, const AnchoredSolver& solver);

  /// Re-solve the per-scenario base voltages for the current i_agg.
  void refresh_base(const AssignmentState& state);
  /// Compute and cache response columns for every present phase of `node`.
  void ensure_columns(int node);
  void evict_columns(int node);
  bool has_columns(int node) const { return has_col_[size_t(node)] != 0; }

  const AnchoredSolver& solver() const { return *solver_; }
  int n() const { return n_; }
  int scenario_count() const { return int(base_v.size()); }
  const std::array<kernels::PlanarVec, 3>& columns(int node) const {
    return zcols_[size_t(node)];
  }

  // planar per-scenario data (index = scenario)
  std::vector<kernels::PlanarVec> base_v;
  std::vector<kernels::PlanarVec> vhat;
  std::vector<std::vector<double>> vhat_mag;

 private:
  const AnchoredSolver* solver_ = nullptr;
  int n_ = 0;
  std::vector<std::array<kernels::PlanarVec, 3>> zcols_;
  std::vector<char> has_col_;
  std::vector<PhaseMask> masks_;
};

/// Per-worker scratch buffers so candidate evaluation never allocates.
struct EvalScratch {
  kernels::PlanarVec vc;
  std::vector<double> mag;
};

/// Reference path: move r's aggregated current onto s, solve the full fixed-Y
/// system per scenario, assign every reduced node its super-node voltage and
/// score. Infeasible (any node-phase magnitude error beyond e_bar in any
/// scenario) yields smice = +inf.
CandidateScore evaluate_candidate(const AssignmentState& state, const Candidate& cand,
                                  const ScenarioLibrary& lib, const AnchoredSolver& solver,
                                  const ReductionConfig& cfg, EvalScratch* scratch = nullptr);

/// Fast path: V_c = V_base + (Z_cols(s) - Z_cols(r)) * i_agg(r) per scenario,
/// identical scoring. Requires cache columns for s and r.
CandidateScore evaluate_candidate_delta(const AssignmentState& state, const Candidate& cand,
                                        const DeltaCache& cache, const ReductionConfig& cfg,
                                        EvalScratch* scratch = nullptr);

/// Apply a selected candidate: merge clusters, re-parent members, contract
/// the super-node adjacency and move the aggregated injection. Throws on a
/// structurally invalid candidate.
void commit(AssignmentState& state, const Candidate& cand);

struct TraceRow {
  int iteration = 0;  // 1-based
  int s = -1, r = -1;
  double smice = 0;
  std::vector<double> max_err;  // per scenario, of the committed candidate
  int supernode_count = 0;      // after the commit
  int candidate_count = 0;      // enumerated this iteration
  double wall_ms = 0;
};

/// Final artifact of a reduction run (optionally radialized).
struct ReducedModel {
  std::vector<int> kept_ids;
  std::vector<PhaseMask> kept_phases;
  BlockMatrix y_kron;
  std::map<int, std::vector<int>> clusters;  // super-node -> sorted members (incl. itself)
  bool radial = false;
  std::vector<int> reinserted;
  double e_bar = 0;
  Objective objective = Objective::magnitude;
  std::vector<std::string> scenario_ids;
  std::vector<double> final_max_err;  // per scenario, via the reduced solve
};

struct ReductionResult {
  ReducedModel model;
  std::vector<TraceRow> trace;
  AssignmentState state;
};

using IterationObserver =
    std::function<void(const AssignmentState& state, const TraceRow& row)>;

/// The full exhaustive reduction loop: enumerate, evaluate all candidates in
/// parallel against an immutable snapshot, pick the minimum-SMICE feasible
/// candidate (lexicographic (s,r) tie-break), commit, repeat until no feasible
/// candidate remains or the target reduction is reached; then Kron-reduce the
/// final partition.
ReductionResult run_reduction(const Network& net, const ScenarioLibrary& lib,
                              const ReductionConfig& cfg,
                              const IterationObserver& observer = {});

/// Per-cluster maxima of a node error vector, cluster order =
/// ascending super-node id.
std::vector<double> mice(std::span<const double> node_err, const std::vector<int>& supernodes,
                         const std::vector<std::vector<int>>& members);

/// Distinct feasible assignments explored by a recorded one-per-iteration
/// trajectory: W = sum over iterations of 2*(n_s - 1), n_s entering each
/// iteration.
long long count_explored(std::span<const TraceRow> trace);

/// Same counter for a simulated batch schedule that removes up to q nodes per
/// iteration from an n-node network until delta_n are gone.
long long explored_for_schedule(long long n, long long delta_n, long long q);

/// Per-scenario max node-phase magnitude error of a reduced model, members
/// inheriting their super-node voltage, via a factorize-once reduced solve.
std::vector<double> model_max_errors(const ReducedModel& model, const Network& net,
                                     const ScenarioLibrary& lib);

}  // namespace kronred
