// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>
#include <set>

#include "kronred/feeder_gen.hpp"
#include "kronred/grid_model.hpp"
#include "kronred/radialize.hpp"
#include "test_util.hpp"

using namespace kronred;
using namespace kronred::testing;

namespace {

Partition split(const Network& net, const std::vector<int>& reduce) {
  Partition part;
  part.reduce = reduce;
  std::vector<char> in_r(size_t(net.size()), 0);
  for (int r : reduce) in_r[size_t(r)] = 1;
  for (int i = 0; i < net.size(); ++i)
    if (!in_r[size_t(i)]) part.keep.push_back(i);
  return part;
}

std::vector<std::vector<int>> detected_as_sorted(const std::vector<Clique>& cliques) {
  std::vector<std::vector<int>> out;
  for (const Clique& c : cliques) out.push_back(c.members);
  std::sort(out.begin(), out.end());
  return out;
}

// trunk 0-1-2, star centers 2 and 5 with two leaves each
Network double_star() {
  Network net;
  net.nodes.push_back(slack_node(0));
  for (int i = 1; i <= 7; ++i) net.nodes.push_back(plain_node(i));
  net.branches.push_back(unit_branch(0, 1));
  net.branches.push_back(unit_branch(1, 2));
  net.branches.push_back(unit_branch(2, 3));
  net.branches.push_back(unit_branch(2, 4));
  net.branches.push_back(unit_branch(2, 5));
  net.branches.push_back(unit_branch(5, 6));
  net.branches.push_back(unit_branch(5, 7));
  return net;
}

}  // namespace

TEST_CASE("trees have no cliques of size three") {
  CHECK(find_maximal_cliques(adjacency(unit_chain(6))).empty());
  CHECK(find_maximal_cliques(adjacency(unit_star4())).empty());
  CHECK(is_tree(adjacency(unit_chain(6))));
}

TEST_CASE("reducing a star center yields exactly its leaf clique") {
  const Network net = unit_star4();
  const BlockAdmittance y = assemble_admittance(net);
  const KronResult kr = kron_reduce(y, phase_masks(net), split(net, {2}));
  const auto cliques = find_maximal_cliques(reduced_topology(kr));
  REQUIRE(cliques.size() == 1);
  CHECK(cliques[0].members == (std::vector<int>{0, 1, 2}));  // compact indices of {0,1,3}
  CHECK_FALSE(is_tree(reduced_topology(kr)));
}

TEST_CASE("two reduced star centers yield two disjoint cliques, matching brute force") {
  const Network net = double_star();
  const BlockAdmittance y = assemble_admittance(net);
  const KronResult kr = kron_reduce(y, phase_masks(net), split(net, {2, 5}));
  const Adjacency topo = reduced_topology(kr);
  const auto got = detected_as_sorted(find_maximal_cliques(topo));
  const auto expect = brute_force_cliques(topo);
  CHECK(got == expect);
  CHECK(got.size() == 1);  // merging both centers meshes all five neighbors together
}

TEST_CASE("clique detection agrees with brute force on random reductions") {
  std::mt19937_64 gen(2024);
  for (int round = 0; round < 12; ++round) {
    GenParams p;
    p.n = 14;
    p.seed = 300 + std::uint64_t(round);
    p.branching = 0.55;
    auto [net, lib] = generate(p);
    (void)lib;
    const BlockAdmittance y = assemble_admittance(net);
    std::vector<int> reduce;
    for (int i = 1; i < net.size(); ++i)
      if (double(gen() >> 11) * 0x1.0p-53 < 0.4) reduce.push_back(i);
    const KronResult kr = kron_reduce(y, phase_masks(net), split(net, reduce));
    const Adjacency topo = reduced_topology(kr);
    CHECK(detected_as_sorted(find_maximal_cliques(topo)) == brute_force_cliques(topo));
  }
}

TEST_CASE("non-decomposable adjacency is rejected") {
  // two triangles sharing an edge cannot be an edge-disjoint clique union
  Adjacency diamond(4);
  diamond.set(0, 1);
  diamond.set(0, 2);
  diamond.set(1, 2);
  diamond.set(1, 3);
  diamond.set(2, 3);
  CHECK_THROWS_AS(find_maximal_cliques(diamond), StructuralError);
}

TEST_CASE("critical nodes: unique Steiner point of a star clique") {
  const Network net = unit_star4();
  CHECK(critical_nodes({0, 1, 3}, net) == std::vector<int>{2});
}

TEST_CASE("critical nodes: both branch points of a double-star clique") {
  const Network net = double_star();
  CHECK(critical_nodes({1, 3, 4, 6, 7}, net) == (std::vector<int>{2, 5}));

  // brute-force cross-check: reinserting exactly {2,5} is the smallest set
  // that restores a tree
  const BlockAdmittance y = assemble_admittance(net);
  const auto masks = phase_masks(net);
  const std::vector<int> reduced{2, 5};
  std::vector<std::vector<int>> subsets{{}, {2}, {5}, {2, 5}};
  std::vector<int> smallest;
  bool found = false;
  for (const auto& sub : subsets) {
    std::vector<int> still_reduced;
    for (int r : reduced)
      if (std::find(sub.begin(), sub.end(), r) == sub.end()) still_reduced.push_back(r);
    const KronResult kr = kron_reduce(y, masks, split(net, still_reduced));
    if (is_tree(reduced_topology(kr)) && !found) {
      smallest = sub;
      found = true;
    }
  }
  CHECK(found);
  CHECK(smallest == (std::vector<int>{2, 5}));

  // members disconnected from the original graph are a structural error
  CHECK_THROWS_AS(critical_nodes({1, 99}, net), StructuralError);
}

TEST_CASE("radializing an already-radial model changes nothing") {
  GenParams p;
  p.n = 18;
  p.seed = 21;
  auto [net, lib] = generate(p);
  const BlockAdmittance y = assemble_admittance(net);
  ReductionConfig cfg;
  cfg.e_bar = 1e-7;  // tiny bound: hardly any reduction, topology stays a tree
  const ReductionResult res = run_reduction(net, lib, cfg);
  REQUIRE(is_tree(block_topology(res.model.y_kron)));
  const ReducedModel rad = radialize(res.model, net, y, &lib);
  CHECK(rad.kept_ids == res.model.kept_ids);
  CHECK(rad.reinserted.empty());
  CHECK(rad.radial);
}

TEST_CASE("star case: radialization reinserts exactly the center") {
  const Network net = unit_star4();
  const BlockAdmittance y = assemble_admittance(net);
  const auto masks = phase_masks(net);
  const KronResult kr = kron_reduce(y, masks, split(net, {2}));

  ReducedModel model;
  model.kept_ids = kr.kept_ids;
  model.kept_phases = kr.kept_phases;
  model.y_kron = kr.y_kron;
  model.clusters = {{0, {0}}, {1, {1, 2}}, {3, {3}}};  // center assigned to node 1
  model.e_bar = 1.0;
  const ReducedModel rad = radialize(model, net, y);
  CHECK(rad.reinserted == std::vector<int>{2});
  CHECK(rad.kept_ids == (std::vector<int>{0, 1, 2, 3}));
  CHECK(rad.radial);
  // the restored topology is the original star
  CHECK(block_topology(rad.y_kron) == adjacency(net));
}

TEST_CASE("radialization yields trees and preserves super-node voltages") {
  int with_cliques = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    GenParams p;
    p.n = 30;
    p.seed = 600 + seed;
    p.branching = 0.5;
    auto [net, lib] = generate(p);
    const BlockAdmittance y = assemble_admittance(net);
    ReductionConfig cfg;
    cfg.e_bar = 5e-3;
    cfg.target_reduction = 0.55;  // stop mid-way so branch nodes stay reduced between kept ones
    const ReductionResult res = run_reduction(net, lib, cfg);
    const bool meshed = !is_tree(block_topology(res.model.y_kron));
    with_cliques += meshed ? 1 : 0;

    const ReducedModel rad = radialize(res.model, net, y, &lib);
    CHECK(rad.radial);
    const Adjacency topo = block_topology(rad.y_kron);
    CHECK(is_tree(topo));
    CHECK(topo.edge_count() == int(rad.kept_ids.size()) - 1);
    // reduction-level cost: the kept set grew by exactly the reinserted nodes
    CHECK(rad.kept_ids.size() == res.model.kept_ids.size() + rad.reinserted.size());

    // electrical equivalence at the original super-nodes, every scenario
    for (size_t l = 0; l < lib.scenarios.size(); ++l) {
      std::vector<cx> i_pre(3 * res.model.kept_ids.size(), cx{});
      for (const auto& [sup, mem] : res.model.clusters) {
        auto it = std::lower_bound(res.model.kept_ids.begin(), res.model.kept_ids.end(), sup);
        const size_t pos = size_t(it - res.model.kept_ids.begin());
        for (int j : mem)
          for (int ph = 0; ph < 3; ++ph)
            i_pre[3 * pos + size_t(ph)] += lib.scenarios[l].injections[size_t(3 * j + ph)];
      }
      KronResult pre;
      pre.y_kron = res.model.y_kron;
      pre.kept_ids = res.model.kept_ids;
      pre.kept_phases = res.model.kept_phases;
      const std::vector<cx> v_pre = solve_kept(pre, i_pre, 0, net.nodes[0].slack_voltage);

      std::vector<cx> i_post(3 * rad.kept_ids.size(), cx{});
      for (const auto& [sup, mem] : rad.clusters) {
        auto it = std::lower_bound(rad.kept_ids.begin(), rad.kept_ids.end(), sup);
        const size_t pos = size_t(it - rad.kept_ids.begin());
        for (int j : mem)
          for (int ph = 0; ph < 3; ++ph)
            i_post[3 * pos + size_t(ph)] += lib.scenarios[l].injections[size_t(3 * j + ph)];
      }
      KronResult post;
      post.y_kron = rad.y_kron;
      post.kept_ids = rad.kept_ids;
      post.kept_phases = rad.kept_phases;
      const std::vector<cx> v_post = solve_kept(post, i_post, 0, net.nodes[0].slack_voltage);

      for (size_t k = 0; k < res.model.kept_ids.size(); ++k) {
        const int id = res.model.kept_ids[k];
        const int kp = post.pos(id);
        REQUIRE(kp >= 0);
        for (int ph = 0; ph < 3; ++ph)
          CHECK(std::abs(v_pre[3 * k + size_t(ph)] - v_post[size_t(3 * kp + ph)]) < 1e-10);
      }
    }
  }
  CHECK(with_cliques > 0);  // the sweep must actually exercise meshed cases
}
