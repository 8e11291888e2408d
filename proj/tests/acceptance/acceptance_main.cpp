// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one criterion per function, one [PASS]/[FAIL] line each.
// Run all criteria or a single one with --criterion N.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>

#include "kronred/feeder_gen.hpp"
#include "kronred/grid_model.hpp"
#include "kronred/io.hpp"
#include "kronred/radialize.hpp"
#include "kronred/reduce.hpp"
#include "../test_util.hpp"

using namespace kronred;
using namespace kronred::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

double urand(std::mt19937_64& gen) { return double(gen() >> 11) * 0x1.0p-53; }

Partition split(const Network& net, const std::vector<int>& reduce) {
  Partition part;
  part.reduce = reduce;
  std::vector<char> in_r(size_t(net.size()), 0);
  for (int r : reduce) in_r[size_t(r)] = 1;
  for (int i = 0; i < net.size(); ++i)
    if (!in_r[size_t(i)]) part.keep.push_back(i);
  return part;
}

std::vector<int> random_reduce_set(const Network& net, std::mt19937_64& gen, double frac) {
  std::vector<int> reduce;
  for (int i = 0; i < net.size(); ++i) {
    if (i == net.slack_id()) continue;
    if (urand(gen) < frac) reduce.push_back(i);
  }
  return reduce;
}

GenParams thousand_node_params() {
  GenParams p;
  p.n = 1000;
  p.seed = 1000;
  p.branching = 0.3;
  p.self_r_min = 0.0016;  // long-feeder impedances: the error bound binds over
  p.self_r_max = 0.0120;  // a wide range instead of saturating at one end
  p.load_p_min = 0.15e-3;
  p.load_p_max = 1.00e-3;
  return p;
}

std::vector<cx> aggregated_kept_injections(const ReducedModel& model,
                                           const std::vector<cx>& injections) {
  std::vector<cx> i_kept(3 * model.kept_ids.size(), cx{});
  for (const auto& [sup, mem] : model.clusters) {
    auto it = std::lower_bound(model.kept_ids.begin(), model.kept_ids.end(), sup);
    const size_t pos = size_t(it - model.kept_ids.begin());
    for (int j : mem)
      for (int ph = 0; ph < 3; ++ph)
        i_kept[3 * pos + size_t(ph)] += injections[size_t(3 * j + ph)];
  }
  return i_kept;
}

KronResult as_kron(const ReducedModel& model) {
  KronResult kr;
  kr.y_kron = model.y_kron;
  kr.kept_ids = model.kept_ids;
  kr.kept_phases = model.kept_phases;
  return kr;
}

// ---------------------------------------------------------------------------

bool criterion_1(std::string& detail) {
  Timer timer;
  std::mt19937_64 gen(1);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    GenParams p;
    p.n = 6 + int(gen() % 55);  // n <= 60
    p.seed = 1000 + std::uint64_t(trial);
    auto [net, lib] = generate(p);
    const BlockAdmittance y = assemble_admittance(net);
    const auto masks = phase_masks(net);
    const Partition part = split(net, random_reduce_set(net, gen, 0.3 + 0.4 * urand(gen)));

    std::vector<cx> inj = lib.scenarios[1].injections;
    for (int r : part.reduce)
      for (int ph = 0; ph < 3; ++ph) inj[size_t(3 * r + ph)] = cx{};

    const AnchoredSolver full(y, masks, 0, net.nodes[0].slack_voltage);
    const std::vector<cx> v_full = full.solve(inj);
    double vmax = 0;
    for (const cx& z : v_full) vmax = std::max(vmax, std::abs(z));

    const KronResult kr = kron_reduce(y, masks, part);
    std::vector<cx> i_kept(3 * kr.kept_ids.size(), cx{});
    for (size_t k = 0; k < kr.kept_ids.size(); ++k)
      for (int ph = 0; ph < 3; ++ph)
        i_kept[3 * k + size_t(ph)] = inj[size_t(3 * kr.kept_ids[k] + ph)];
    const std::vector<cx> v_kept = solve_kept(kr, i_kept, 0, net.nodes[0].slack_voltage);

    for (size_t k = 0; k < kr.kept_ids.size(); ++k)
      for (int ph = 0; ph < 3; ++ph)
        worst = std::max(worst, std::abs(v_kept[3 * k + size_t(ph)] -
                                         v_full[size_t(3 * kr.kept_ids[k] + ph)]) /
                                    vmax);
  }
  const double secs = timer.seconds();
  char buf[160];
  std::snprintf(buf, sizeof buf, "50 feeders, worst rel err %.2e, %.2f s", worst, secs);
  detail = buf;
  return worst <= 1e-10 && secs < 10.0;
}

bool criterion_2(std::string& detail) {
  GenParams p;
  p.n = 40;
  p.seed = 2;
  auto [net, lib] = generate(p);
  const BlockAdmittance y = assemble_admittance(net);
  const auto masks = phase_masks(net);
  const AnchoredSolver full(y, masks, 0, net.nodes[0].slack_voltage);

  double worst = 0;
  int checks = 0;
  ReductionConfig cfg;
  cfg.e_bar = 1e-3;
  run_reduction(net, lib, cfg, [&](const AssignmentState& st, const TraceRow&) {
    Partition part;
    part.keep = st.supernodes;
    for (int i = 0; i < st.n; ++i)
      if (st.sup[size_t(i)] != i) part.reduce.push_back(i);
    const KronResult kr = kron_reduce(y, masks, part);
    for (size_t l = 0; l < lib.scenarios.size(); ++l) {
      const std::vector<cx> v_full = full.solve(st.i_agg[l]);
      std::vector<cx> i_kept(3 * kr.kept_ids.size(), cx{});
      for (size_t k = 0; k < kr.kept_ids.size(); ++k)
        for (int ph = 0; ph < 3; ++ph)
          i_kept[3 * k + size_t(ph)] = st.i_agg[l][size_t(3 * kr.kept_ids[k] + ph)];
      const std::vector<cx> v_kept = solve_kept(kr, i_kept, 0, net.nodes[0].slack_voltage);
      for (size_t k = 0; k < kr.kept_ids.size(); ++k)
        for (int ph = 0; ph < 3; ++ph)
          worst = std::max(worst, std::abs(v_kept[3 * k + size_t(ph)] -
                                           v_full[size_t(3 * kr.kept_ids[k] + ph)]));
      ++checks;
    }
  });
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d mid-run checks, worst |dV| %.2e", checks, worst);
  detail = buf;
  return checks > 0 && worst <= 1e-10;
}

bool criterion_3(std::string& detail) {
  std::string parts;
  bool ok = true;
  for (double e_bar : {1e-4, 1e-3, 1e-2}) {
    GenParams p;
    p.n = 80;
    p.seed = 3;
    p.self_r_min = 0.0016;  // heavier feeder: the bound binds before full collapse
    p.self_r_max = 0.0120;
    p.load_p_min = 0.15e-3;
    p.load_p_max = 1.00e-3;
    auto [net, lib] = generate(p);
    ReductionConfig cfg;
    cfg.e_bar = e_bar;
    const ReductionResult res = run_reduction(net, lib, cfg);
    double worst_commit = 0;
    for (const TraceRow& row : res.trace)
      for (double e : row.max_err) worst_commit = std::max(worst_commit, e);
    double worst_final = 0;
    for (double e : model_max_errors(res.model, net, lib)) worst_final = std::max(worst_final, e);
    // zero tolerance on the bound itself
    ok = ok && worst_commit <= e_bar && worst_final <= e_bar;
    char buf[120];
    std::snprintf(buf, sizeof buf, " Ebar=%.0e: commit %.3e final %.3e red %.0f%%;", e_bar,
                  worst_commit, worst_final, 100.0 * res.state.reduction_fraction());
    parts += buf;
  }
  detail = parts;
  return ok;
}

bool criterion_4(std::string& detail) {
  Timer timer;
  const GenParams p = thousand_node_params();
  auto [net, lib] = generate(p);
  std::string parts;
  double prev = -1;
  bool monotone = true;
  for (double e_bar : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
    ReductionConfig cfg;
    cfg.e_bar = e_bar;
    cfg.workers = 1;
    const ReductionResult res = run_reduction(net, lib, cfg);
    const double red = 100.0 * res.state.reduction_fraction();
    monotone = monotone && red >= prev - 1e-12;
    prev = red;
    char buf[80];
    std::snprintf(buf, sizeof buf, " %.0e->%.1f%%", e_bar, red);
    parts += buf;
  }
  const double secs = timer.seconds();
  char buf[64];
  std::snprintf(buf, sizeof buf, " | %.1f s single-threaded", secs);
  detail = parts + buf;
  return monotone && secs < 900.0;
}

bool criterion_5(std::string& detail) {
  std::mt19937_64 gen(5);
  int mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    GenParams p;
    p.n = 8 + int(gen() % 21);
    p.seed = 5000 + std::uint64_t(trial);
    auto [net, lib] = generate(p);
    (void)lib;
    const BlockAdmittance y = assemble_admittance(net);
    std::vector<int> reduce = random_reduce_set(net, gen, 0.35);
    if (reduce.empty()) reduce.push_back(1 + int(gen() % std::uint64_t(net.size() - 1)));
    const Adjacency three = reduced_topology(kron_reduce(y, phase_masks(net), split(net, reduce)));
    const Adjacency scalar = laplacian_kron_topology(net, reduce);
    if (!(three == scalar)) ++mismatches;
  }
  detail = "100 random feeders/elimination sets, " + std::to_string(mismatches) + " mismatches";
  return mismatches == 0;
}

bool criterion_6(std::string& detail) {
  // recorded trajectories match the closed form
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GenParams p;
    p.n = 10 + int(seed) * 2;
    p.seed = 600 + seed;
    p.frac_single_phase = 0;
    p.frac_two_phase = 0;
    auto [net, lib] = generate(p);
    ReductionConfig cfg;
    cfg.e_bar = kInf;
    const ReductionResult res = run_reduction(net, lib, cfg);
    const long long w = count_explored(res.trace);
    ok = ok && (w == explored_for_schedule(net.size(),
                                           static_cast<long long>(res.trace.size()), 1));
  }
  // batch schedules never explore more than one-at-a-time schedules
  std::mt19937_64 gen(6);
  for (int draw = 0; draw < 20; ++draw) {
    const long long n = 5 + (long long)(gen() % 400);
    const long long dn = 1 + (long long)(gen() % std::uint64_t(n - 2));
    const long long q = 2 + (long long)(gen() % 9);
    ok = ok && (explored_for_schedule(n, dn, 1) >= explored_for_schedule(n, dn, q));
  }
  detail = "trajectory counters match 2(n_s-1) sums; W(q=1) >= W(q>1) on 20 draws";
  return ok;
}

bool criterion_7(std::string& detail) {
  // a reduced star center must be the one reinserted node
  {
    const Network net = unit_star4();
    const BlockAdmittance y = assemble_admittance(net);
    const KronResult kr = kron_reduce(y, phase_masks(net), split(net, {2}));
    ReducedModel model;
    model.kept_ids = kr.kept_ids;
    model.kept_phases = kr.kept_phases;
    model.y_kron = kr.y_kron;
    model.clusters = {{0, {0}}, {1, {1, 2}}, {3, {3}}};
    model.e_bar = 1.0;
    const ReducedModel rad = radialize(model, net, y);
    if (rad.reinserted != std::vector<int>{2} || !is_tree(block_topology(rad.y_kron))) {
      detail = "star case failed";
      return false;
    }
  }

  int with_cliques = 0;
  double worst = 0;
  std::uint64_t seed = 0;
  while (with_cliques < 50 && seed < 400) {
    ++seed;
    GenParams p;
    p.n = 30;
    p.seed = 7000 + seed;
    p.branching = 0.5;
    auto [net, lib] = generate(p);
    const BlockAdmittance y = assemble_admittance(net);
    ReductionConfig cfg;
    cfg.e_bar = 5e-3;
    cfg.target_reduction = 0.55;  // stop mid-way so reduced branch nodes mesh the kept set
    const ReductionResult res = run_reduction(net, lib, cfg);
    if (is_tree(block_topology(res.model.y_kron))) continue;
    ++with_cliques;

    const ReducedModel rad = radialize(res.model, net, y, &lib);
    const Adjacency topo = block_topology(rad.y_kron);
    if (!is_tree(topo) || topo.edge_count() != int(rad.kept_ids.size()) - 1) {
      detail = "radialized model is not a tree (seed " + std::to_string(seed) + ")";
      return false;
    }
    const KronResult pre = as_kron(res.model);
    const KronResult post = as_kron(rad);
    for (size_t l = 0; l < lib.scenarios.size(); ++l) {
      const std::vector<cx> i_pre =
          aggregated_kept_injections(res.model, lib.scenarios[l].injections);
      const std::vector<cx> i_post =
          aggregated_kept_injections(rad, lib.scenarios[l].injections);
      const std::vector<cx> v_pre = solve_kept(pre, i_pre, 0, net.nodes[0].slack_voltage);
      const std::vector<cx> v_post = solve_kept(post, i_post, 0, net.nodes[0].slack_voltage);
      for (size_t k = 0; k < res.model.kept_ids.size(); ++k) {
        const int kp = post.pos(res.model.kept_ids[k]);
        for (int ph = 0; ph < 3; ++ph)
          worst = std::max(worst, std::abs(v_pre[3 * k + size_t(ph)] -
                                           v_post[size_t(3 * kp + ph)]));
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d meshed models radialized, worst super-node |dV| %.2e",
                with_cliques, worst);
  detail = buf;
  return with_cliques == 50 && worst <= 1e-10;
}

bool criterion_8(std::string& detail) {
  int compared = 0;
  double worst = 0;
  bool flags_match = true;
  std::uint64_t seed = 0;
  while (compared < 1000 && seed < 100) {
    ++seed;
    GenParams p;
    p.n = 24;
    p.seed = 8000 + seed;
    auto [net, lib] = generate(p);
    const BlockAdmittance y = assemble_admittance(net);
    const AnchoredSolver solver(y, phase_masks(net), 0, net.nodes[0].slack_voltage);
    AssignmentState st = init_state(net, lib);
    DeltaCache cache(lib, solver);
    cache.refresh_base(st);
    ReductionConfig cfg;
    cfg.e_bar = 1e-3;

    for (int round = 0; round < 6 && compared < 1000; ++round) {
      const auto cands = enumerate_candidates(st, net);
      if (cands.empty()) break;
      for (const Candidate& c : cands) {
        cache.ensure_columns(c.s);
        cache.ensure_columns(c.r);
      }
      int best = -1;
      double best_smice = kInf;
      for (const Candidate& c : cands) {
        const CandidateScore d = evaluate_candidate_delta(st, c, cache, cfg);
        const CandidateScore n2 = evaluate_candidate(st, c, lib, solver, cfg);
        ++compared;
        if (d.feasible != n2.feasible) flags_match = false;
        if (d.feasible && n2.feasible) worst = std::max(worst, std::abs(d.smice - n2.smice));
        if (d.feasible && d.smice < best_smice) {
          best_smice = d.smice;
          best = int(&c - cands.data());
        }
      }
      if (best < 0) break;
      commit(st, cands[size_t(best)]);
      cache.refresh_base(st);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d candidates, max |SMICE diff| %.2e, feasibility %s",
                compared, worst, flags_match ? "consistent" : "MISMATCH");
  detail = buf;
  return compared >= 1000 && flags_match && worst <= 1e-9;
}

bool criterion_9(std::string& detail) {
  const GenParams p = thousand_node_params();
  auto [net, lib] = generate(p);
  ReductionConfig cfg;
  cfg.e_bar = 1e-2;
  cfg.target_reduction = 0.5;

  cfg.workers = 1;
  Timer t1;
  const ReductionResult r1 = run_reduction(net, lib, cfg);
  const double s1 = t1.seconds();

  cfg.workers = 4;
  Timer t4;
  const ReductionResult r4 = run_reduction(net, lib, cfg);
  const double s4 = t4.seconds();

  const bool identical = reduced_json_string(r1.model) == reduced_json_string(r4.model);
  const bool speedup = s4 <= 0.6 * s1;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "outputs %s; 1 worker %.1f s, 4 workers %.1f s (ratio %.2f, need <= 0.60)",
                identical ? "byte-identical" : "DIFFER", s1, s4, s4 / s1);
  detail = buf;
  return identical && speedup;
}

bool criterion_10(std::string& detail) {
  GenParams p;
  p.n = 120;
  p.seed = 10;
  p.scenario_count = 168;
  p.scenario_spread = 0.4;
  auto [net, lib] = generate(p);

  // train on the two extreme scenarios only
  ScenarioLibrary training;
  training.n = lib.n;
  training.scenarios = {lib.scenarios[0], lib.scenarios[1]};

  ReductionConfig cfg;
  cfg.e_bar = 1e-3;
  const ReductionResult res = run_reduction(net, training, cfg);

  const ValidateReport rep = make_validate_report(res.model, net, lib, 20);
  write_validate_report(rep, "/tmp/kronred_acceptance_report.csv");

  double train_worst = 0;
  for (double e : res.model.final_max_err) train_worst = std::max(train_worst, e);
  double off_worst = 0;
  int counted = 0;
  for (int c : rep.bin_counts) counted += c;
  for (double e : rep.max_err) off_worst = std::max(off_worst, e);

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "red %.0f%%, train max %.3e <= %.0e, 168 scenarios reported (worst off-train "
                "%.3e, unbounded by design)",
                100.0 * res.state.reduction_fraction(), train_worst, cfg.e_bar, off_worst);
  detail = buf;
  return rep.max_err.size() == 168 && counted == 168 && train_worst <= cfg.e_bar;
}

struct CriterionEntry {
  int id;
  const char* name;
  std::function<bool(std::string&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  const std::vector<CriterionEntry> criteria{
      {1, "Kron exactness on zero-injection partitions", criterion_1},
      {2, "aggregation consistency (reduced vs full solve)", criterion_2},
      {3, "error-bound enforcement across Ebar grid", criterion_3},
      {4, "trade-off monotonicity on the 1000-node feeder", criterion_4},
      {5, "three-phase vs scalar-Laplacian reduced topology", criterion_5},
      {6, "explored-assignment counting laws", criterion_6},
      {7, "radialization: trees with preserved voltages", criterion_7},
      {8, "delta-path vs naive-path SMICE equivalence", criterion_8},
      {9, "worker determinism and parallel speedup", criterion_9},
      {10, "robustness report over 168 scenarios", criterion_10},
  };

  int failures = 0;
  for (const CriterionEntry& c : criteria) {
    if (only != 0 && c.id != only) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s -- %s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
