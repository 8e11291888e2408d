// SPDX-License-Identifier: Apache-2.0
#include "kronred/reduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>

#include "kronred/errors.hpp"
#include "kronred/grid_model.hpp"
#include "kronred/parallel.hpp"

namespace kronred {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using kernels::PlanarVec;

}  // namespace

std::vector<std::pair<int, int>> AssignmentState::assignment_pairs() const {
  std::vector<std::pair<int, int>> s;
  s.reserve(size_t(n));
  for (int j = 0; j < n; ++j) s.emplace_back(sup[size_t(j)], j);
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<std::uint8_t> AssignmentState::assignment_matrix() const {
  std::vector<std::uint8_t> a(size_t(n) * size_t(n), 0);
  for (int j = 0; j < n; ++j) a[size_t(sup[size_t(j)]) * size_t(n) + size_t(j)] = 1;
  return a;
}

AssignmentState init_state(const Network& net, const ScenarioLibrary& lib) {
  if (lib.scenarios.empty()) throw ValidationError("scenario library is empty");
  if (lib.n != net.size())
    throw ValidationError("scenario library was built for a different network size");

  AssignmentState st;
  st.n = net.size();
  st.slack = net.slack_id();
  st.sup.resize(size_t(st.n));
  st.members.assign(size_t(st.n), {});
  st.supernodes.resize(size_t(st.n));
  for (int i = 0; i < st.n; ++i) {
    st.sup[size_t(i)] = i;
    st.members[size_t(i)] = {i};
    st.supernodes[size_t(i)] = i;
  }
  const Adjacency adj = adjacency(net);
  st.lambda.assign(size_t(st.n), {});
  for (int i = 0; i < st.n; ++i) st.lambda[size_t(i)] = adj.neighbors(i);
  st.i_agg.reserve(lib.scenarios.size());
  for (const Scenario& sc : lib.scenarios) st.i_agg.push_back(sc.injections);
  return st;
}

std::vector<Candidate> enumerate_candidates(const AssignmentState& state, const Network& net) {
  const auto masks = phase_masks(net);
  std::vector<Candidate> cands;
  for (int s : state.supernodes) {
    for (int r : state.lambda[size_t(s)]) {
      if (r == state.slack) continue;
      if (masks[size_t(r)].subset_of(masks[size_t(s)])) cands.push_back({s, r});
    }
  }
  return cands;
}

// ---------------------------------------------------------------------------
// scoring

namespace {

struct ScenScore {
  double max_err = 0;
  double smice = 0;
  bool feasible = true;
};

// Error scan with super-node voltages distributed to their cluster members:
// feasibility is always gated on the magnitude error; the MICE
// objective entries switch to complex differences in complex mode.
ScenScore score_scenario(const AssignmentState& st, int s, int r, const PlanarVec& vc,
                         const double* mag, const PlanarVec& vhat, const double* vhat_mag,
                         const std::vector<PhaseMask>& masks, double e_bar, Objective obj) {
  ScenScore out;
  auto member_err = [&](int i, int j, double& cluster_max) {
    const PhaseMask mj = masks[size_t(j)];
    for (int p = 0; p < 3; ++p) {
      if (!mj.has(p)) continue;
      const size_t si = size_t(3 * i + p);
      const size_t sj = size_t(3 * j + p);
      const double em = std::fabs(mag[si] - vhat_mag[sj]);
      if (em > out.max_err) out.max_err = em;
      double eo = em;
      if (obj == Objective::complex_error) {
        const double dr = vc.re[si] - vhat.re[sj];
        const double di = vc.im[si] - vhat.im[sj];
        eo = std::sqrt(dr * dr + di * di);
      }
      if (eo > cluster_max) cluster_max = eo;
    }
  };
  for (int i : st.supernodes) {
    if (i == r) continue;
    double cmax = 0;
    for (int j : st.members[size_t(i)]) member_err(i, j, cmax);
    if (i == s)
      for (int j : st.members[size_t(r)]) member_err(i, j, cmax);
    if (out.max_err > e_bar) {
      out.feasible = false;
      return out;
    }
    out.smice += cmax;
  }
  return out;
}

void ensure_scratch(EvalScratch& scr, size_t dim) {
  if (scr.vc.size() != dim) {
    scr.vc = PlanarVec(dim);
    scr.mag.assign(dim, 0.0);
  }
}

CandidateScore eval_full_solve(const AssignmentState& state, const Candidate& cand,
                               const AnchoredSolver& solver,
                               const std::vector<const PlanarVec*>& vhat,
                               const std::vector<const double*>& vhat_mag,
                               const ReductionConfig& cfg, EvalScratch& scr) {
  const auto& k = kernels::active();
  const size_t dim = size_t(3 * solver.n());
  ensure_scratch(scr, dim);
  const int scen_count = int(vhat.size());

  CandidateScore score;
  score.max_err.assign(size_t(scen_count), 0.0);
  score.feasible = true;
  double smice = 0;
  for (int l = 0; l < scen_count && score.feasible; ++l) {
    std::vector<cx> ic = state.i_agg[size_t(l)];
    for (int p = 0; p < 3; ++p) {
      ic[size_t(3 * cand.s + p)] += ic[size_t(3 * cand.r + p)];
      ic[size_t(3 * cand.r + p)] = cx{};
    }
    const std::vector<cx> vc = solver.solve(ic);
    for (size_t t = 0; t < dim; ++t) {
      scr.vc.re[t] = vc[t].real();
      scr.vc.im[t] = vc[t].imag();
    }
    k.magnitude(dim, scr.vc.re.data(), scr.vc.im.data(), scr.mag.data());
    const ScenScore ss = score_scenario(state, cand.s, cand.r, scr.vc, scr.mag.data(),
                                        *vhat[size_t(l)], vhat_mag[size_t(l)],
                                        solver.phases(), cfg.e_bar, cfg.objective);
    score.max_err[size_t(l)] = ss.max_err;
    score.feasible = ss.feasible;
    smice += ss.smice;
  }
  score.smice = score.feasible ? smice : kInf;
  return score;
}

}  // namespace

CandidateScore evaluate_candidate(const AssignmentState& state, const Candidate& cand,
                                  const ScenarioLibrary& lib, const AnchoredSolver& solver,
                                  const ReductionConfig& cfg, EvalScratch* scratch) {
  const auto& k = kernels::active();
  EvalScratch local;
  EvalScratch& scr = scratch != nullptr ? *scratch : local;

  // planar reference data, built on the fly for the reference path
  const size_t dim = size_t(3 * solver.n());
  std::vector<PlanarVec> vhat_store(lib.scenarios.size());
  std::vector<std::vector<double>> mag_store(lib.scenarios.size());
  std::vector<const PlanarVec*> vhat;
  std::vector<const double*> vhat_mag;
  for (size_t l = 0; l < lib.scenarios.size(); ++l) {
    vhat_store[l].assign_from(lib.scenarios[l].voltages);
    mag_store[l].assign(dim, 0.0);
    k.magnitude(dim, vhat_store[l].re.data(), vhat_store[l].im.data(), mag_store[l].data());
    vhat.push_back(&vhat_store[l]);
    vhat_mag.push_back(mag_store[l].data());
  }
  return eval_full_solve(state, cand, solver, vhat, vhat_mag, cfg, scr);
}

CandidateScore evaluate_candidate_delta(const AssignmentState& state, const Candidate& cand,
                                        const DeltaCache& cache, const ReductionConfig& cfg,
                                        EvalScratch* scratch) {
  EvalScratch local;
  EvalScratch& scr = scratch != nullptr ? *scratch : local;

  if (!cache.has_columns(cand.s) || !cache.has_columns(cand.r)) {
    // cache miss: fall back to the reference full-solve path
    std::vector<const PlanarVec*> vhat;
    std::vector<const double*> vhat_mag;
    for (int l = 0; l < cache.scenario_count(); ++l) {
      vhat.push_back(&cache.vhat[size_t(l)]);
      vhat_mag.push_back(cache.vhat_mag[size_t(l)].data());
    }
    return eval_full_solve(state, cand, cache.solver(), vhat, vhat_mag, cfg, scr);
  }

  const auto& k = kernels::active();
  const size_t dim = size_t(3 * cache.n());
  ensure_scratch(scr, dim);
  const auto& zs = cache.columns(cand.s);
  const auto& zr = cache.columns(cand.r);

  CandidateScore score;
  score.max_err.assign(size_t(cache.scenario_count()), 0.0);
  score.feasible = true;
  double smice = 0;
  for (int l = 0; l < cache.scenario_count() && score.feasible; ++l) {
    const PlanarVec& base = cache.base_v[size_t(l)];
    std::memcpy(scr.vc.re.data(), base.re.data(), dim * sizeof(double));
    std::memcpy(scr.vc.im.data(), base.im.data(), dim * sizeof(double));
    for (int p = 0; p < 3; ++p) {
      const cx c = state.i_agg[size_t(l)][size_t(3 * cand.r + p)];
      if (c == cx{}) continue;
      if (zs[size_t(p)].size() != dim || zr[size_t(p)].size() != dim)
        throw Error("delta cache: missing response column for a loaded phase");
      k.axpy_diff(dim, c.real(), c.imag(), zs[size_t(p)].re.data(), zs[size_t(p)].im.data(),
                  zr[size_t(p)].re.data(), zr[size_t(p)].im.data(), scr.vc.re.data(),
                  scr.vc.im.data());
    }
    k.magnitude(dim, scr.vc.re.data(), scr.vc.im.data(), scr.mag.data());
    const ScenScore ss = score_scenario(state, cand.s, cand.r, scr.vc, scr.mag.data(),
                                        cache.vhat[size_t(l)], cache.vhat_mag[size_t(l)].data(),
                                        cache.solver().phases(), cfg.e_bar, cfg.objective);
    score.max_err[size_t(l)] = ss.max_err;
    score.feasible = ss.feasible;
    smice += ss.smice;
  }
  score.smice = score.feasible ? smice : kInf;
  return score;
}

// ---------------------------------------------------------------------------
// delta cache

DeltaCache::DeltaCache(const ScenarioLibrary& lib, const AnchoredSolver& solver)
    : solver_(&solver), n_(solver.n()), masks_(solver.phases()) {
  const size_t dim = size_t(3 * n_);
  const auto& k = kernels::active();
  base_v.resize(lib.scenarios.size());
  vhat.resize(lib.scenarios.size());
  vhat_mag.resize(lib.scenarios.size());
  for (size_t l = 0; l < lib.scenarios.size(); ++l) {
    vhat[l].assign_from(lib.scenarios[l].voltages);
    vhat_mag[l].assign(dim, 0.0);
    k.magnitude(dim, vhat[l].re.data(), vhat[l].im.data(), vhat_mag[l].data());
  }
  zcols_.resize(size_t(n_));
  has_col_.assign(size_t(n_), 0);
}

void DeltaCache::refresh_base(const AssignmentState& state) {
  for (size_t l = 0; l < state.i_agg.size(); ++l)
    base_v[l].assign_from(solver_->solve(state.i_agg[l]));
}

void DeltaCache::ensure_columns(int node) {
  if (has_col_[size_t(node)]) return;
  const size_t dim = size_t(3 * n_);
  const std::vector<cx>& v0 = solver_->zero_injection_solution();
  std::vector<cx> unit(dim, cx{});
  for (int p = 0; p < 3; ++p) {
    if (!masks_[size_t(node)].has(p)) continue;
    unit[size_t(3 * node + p)] = cx{1.0, 0.0};
    const std::vector<cx> resp = solver_->solve(unit);
    unit[size_t(3 * node + p)] = cx{};
    PlanarVec& col = zcols_[size_t(node)][size_t(p)];
    col = PlanarVec(dim);
    for (size_t t = 0; t < dim; ++t) {
      const cx d = resp[t] - v0[t];
      col.re[t] = d.real();
      col.im[t] = d.imag();
    }
  }
  has_col_[size_t(node)] = 1;
}

void DeltaCache::evict_columns(int node) {
  for (auto& col : zcols_[size_t(node)]) col = PlanarVec();
  has_col_[size_t(node)] = 0;
}

// ---------------------------------------------------------------------------
// commit

void commit(AssignmentState& state, const Candidate& cand) {
  const int s = cand.s;
  const int r = cand.r;
  if (r == state.slack) throw Error("commit: the slack node cannot be absorbed");
  auto sup_it = std::lower_bound(state.supernodes.begin(), state.supernodes.end(), r);
  if (sup_it == state.supernodes.end() || *sup_it != r || state.members[size_t(s)].empty())
    throw Error("commit: candidate references an inactive super-node");
  auto& ls = state.lambda[size_t(s)];
  if (!std::binary_search(ls.begin(), ls.end(), r))
    throw Error("commit: candidate nodes are not adjacent super-nodes");

  // re-parent r's cluster
  for (int j : state.members[size_t(r)]) state.sup[size_t(j)] = s;
  auto& ms = state.members[size_t(s)];
  auto& mr = state.members[size_t(r)];
  ms.insert(ms.end(), mr.begin(), mr.end());
  mr.clear();
  state.supernodes.erase(sup_it);

  // contract the super-node adjacency: s inherits r's neighbors
  auto& lr = state.lambda[size_t(r)];
  auto erase_sorted = [](std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
  };
  auto insert_sorted = [](std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  };
  erase_sorted(ls, r);
  for (int t : lr) {
    if (t == s) continue;
    erase_sorted(state.lambda[size_t(t)], r);
    insert_sorted(state.lambda[size_t(t)], s);
    insert_sorted(ls, t);
  }
  lr.clear();

  // move the aggregated injection
  for (auto& inj : state.i_agg) {
    for (int p = 0; p < 3; ++p) {
      inj[size_t(3 * s + p)] += inj[size_t(3 * r + p)];
      inj[size_t(3 * r + p)] = cx{};
    }
  }
}

// ---------------------------------------------------------------------------
// driver

ReductionResult run_reduction(const Network& net, const ScenarioLibrary& lib,
                              const ReductionConfig& cfg, const IterationObserver& observer) {
  validate_or_throw(net);
  if (!(cfg.e_bar >= 0)) throw ConfigError("e_bar must be non-negative");
  if (cfg.target_reduction && !(*cfg.target_reduction >= 0 && *cfg.target_reduction <= 1))
    throw ConfigError("target_reduction must lie in [0,1]");

  const BlockAdmittance y = assemble_admittance(net);
  const auto masks = phase_masks(net);
  const int slack = net.slack_id();
  const AnchoredSolver solver(y, masks, slack, net.nodes[size_t(slack)].slack_voltage);

  AssignmentState state = init_state(net, lib);
  DeltaCache cache(lib, solver);
  if (cfg.use_delta) cache.refresh_base(state);

  std::vector<TraceRow> trace;
  int iteration = 0;
  const int workers = std::max(1, cfg.workers);

  auto target_reached = [&] {
    return cfg.target_reduction && state.reduction_fraction() >= *cfg.target_reduction;
  };

  while (!target_reached()) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Candidate> cands = enumerate_candidates(state, net);
    if (cands.empty()) break;

    if (cfg.use_delta) {
      std::set<int> endpoints;
      for (const Candidate& c : cands) {
        endpoints.insert(c.s);
        endpoints.insert(c.r);
      }
      for (int node : endpoints) cache.ensure_columns(node);
    }

    std::vector<CandidateScore> scores(cands.size());
    parallel_chunks(cands.size(), workers, [&](size_t begin, size_t end) {
      EvalScratch scratch;
      for (size_t i = begin; i < end; ++i) {
        scores[i] = cfg.use_delta
                        ? evaluate_candidate_delta(state, cands[i], cache, cfg, &scratch)
                        : evaluate_candidate(state, cands[i], lib, solver, cfg, &scratch);
      }
    });

    // min SMICE; candidates are lexicographically ordered, strict < keeps the
    // first (smallest (s,r)) among ties
    int best = -1;
    for (size_t i = 0; i < scores.size(); ++i) {
      if (!scores[i].feasible) continue;
      if (best < 0 || scores[i].smice < scores[size_t(best)].smice) best = int(i);
    }
    if (best < 0) break;  // no feasible assignment left

    commit(state, cands[size_t(best)]);
    if (cfg.use_delta) {
      cache.evict_columns(cands[size_t(best)].r);
      cache.refresh_base(state);
    }

    const auto t1 = std::chrono::steady_clock::now();
    TraceRow row;
    row.iteration = ++iteration;
    row.s = cands[size_t(best)].s;
    row.r = cands[size_t(best)].r;
    row.smice = scores[size_t(best)].smice;
    row.max_err = scores[size_t(best)].max_err;
    row.supernode_count = state.supernode_count();
    row.candidate_count = int(cands.size());
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    trace.push_back(row);
    if (observer) observer(state, row);
  }

  // final Kron reduction over the surviving super-nodes
  Partition part;
  part.keep = state.supernodes;
  for (int i = 0; i < state.n; ++i)
    if (state.sup[size_t(i)] != i) part.reduce.push_back(i);
  check_partition(part, state.n, slack);

  ReductionResult result;
  result.trace = std::move(trace);
  ReducedModel& model = result.model;
  KronResult kr = kron_reduce(y, masks, part);
  model.kept_ids = std::move(kr.kept_ids);
  model.kept_phases = std::move(kr.kept_phases);
  model.y_kron = std::move(kr.y_kron);
  for (int i : state.supernodes) {
    std::vector<int> mem = state.members[size_t(i)];
    std::sort(mem.begin(), mem.end());
    model.clusters[i] = std::move(mem);
  }
  model.e_bar = cfg.e_bar;
  model.objective = cfg.objective;
  model.scenario_ids = lib.ids();
  model.final_max_err = model_max_errors(model, net, lib);
  result.state = std::move(state);
  return result;
}

// ---------------------------------------------------------------------------
// counters and reports

std::vector<double> mice(std::span<const double> node_err, const std::vector<int>& supernodes,
                         const std::vector<std::vector<int>>& members) {
  std::vector<double> out;
  out.reserve(supernodes.size());
  for (int i : supernodes) {
    double m = 0;
    for (int j : members[size_t(i)]) m = std::max(m, node_err[size_t(j)]);
    out.push_back(m);
  }
  return out;
}

long long count_explored(std::span<const TraceRow> trace) {
  // supernode_count is recorded after each commit; the count entering the
  // iteration is one higher, so 2*(entering - 1) = 2*after.
  long long w = 0;
  for (const TraceRow& row : trace) w += 2LL * row.supernode_count;
  return w;
}

long long explored_for_schedule(long long n, long long delta_n, long long q) {
  if (q < 1 || delta_n < 0 || delta_n >= n) throw ConfigError("bad schedule parameters");
  long long w = 0;
  long long ns = n;
  long long remaining = delta_n;
  while (remaining > 0) {
    w += 2 * (ns - 1);
    const long long red = std::min(q, remaining);
    ns -= red;
    remaining -= red;
  }
  return w;
}

std::vector<double> model_max_errors(const ReducedModel& model, const Network& net,
                                     const ScenarioLibrary& lib) {
  if (lib.n != net.size())
    throw ValidationError("scenario library was built for a different network size");
  const int slack = net.slack_id();
  auto pos_of = [&](int id) {
    auto it = std::lower_bound(model.kept_ids.begin(), model.kept_ids.end(), id);
    if (it == model.kept_ids.end() || *it != id)
      throw ValidationError("reduced model does not keep node " + std::to_string(id));
    return int(it - model.kept_ids.begin());
  };
  const int slack_pos = pos_of(slack);
  const AnchoredSolver solver(model.y_kron, model.kept_phases, slack_pos,
                              net.nodes[size_t(slack)].slack_voltage);

  // assigned compact position per original node: kept nodes resolve to
  // themselves, members inherit their cluster's super-node
  std::vector<int> assigned(size_t(net.size()), -1);
  for (const auto& [i, mem] : model.clusters) {
    const int pi = pos_of(i);
    for (int j : mem) {
      if (j < 0 || j >= net.size())
        throw ValidationError("cluster of " + std::to_string(i) + " references unknown node");
      assigned[size_t(j)] = pi;
    }
  }
  for (size_t p = 0; p < model.kept_ids.size(); ++p)
    assigned[size_t(model.kept_ids[p])] = int(p);
  for (int j = 0; j < net.size(); ++j)
    if (assigned[size_t(j)] < 0)
      throw ValidationError("node " + std::to_string(j) + " is not covered by any cluster");

  const auto masks = phase_masks(net);
  const size_t kdim = size_t(3 * model.y_kron.n());
  std::vector<double> out;
  out.reserve(lib.scenarios.size());
  for (const Scenario& sc : lib.scenarios) {
    // aggregate cluster injections onto super-nodes (reinserted nodes carry
    // zero of their own; their original injection stays with their cluster)
    std::vector<cx> i_kept(kdim, cx{});
    for (const auto& [i, mem] : model.clusters) {
      const int pi = pos_of(i);
      for (int j : mem)
        for (int p = 0; p < 3; ++p)
          i_kept[size_t(3 * pi + p)] += sc.injections[size_t(3 * j + p)];
    }
    const std::vector<cx> vk = solver.solve(i_kept);
    double err = 0;
    for (int j = 0; j < net.size(); ++j) {
      const int pj = assigned[size_t(j)];
      for (int p = 0; p < 3; ++p) {
        if (!masks[size_t(j)].has(p)) continue;
        const double e =
            std::fabs(std::abs(vk[size_t(3 * pj + p)]) - std::abs(sc.voltages[size_t(3 * j + p)]));
        err = std::max(err, e);
      }
    }
    out.push_back(err);
  }
  return out;
}

}  // namespace kronred
