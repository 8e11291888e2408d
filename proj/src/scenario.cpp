// SPDX-License-Identifier: Apache-2.0
#include "kronred/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "kronred/grid_model.hpp"

namespace kronred {

namespace {

double inf_norm(std::span<const cx> v) {
  double m = 0;
  for (const cx& z : v) m = std::max(m, std::abs(z));
  return m;
}

void zero_invalid_entries(const Network& net, std::vector<cx>& inj) {
  const int slack = net.slack_id();
  for (const Node& nd : net.nodes) {
    for (int p = 0; p < 3; ++p) {
      if (nd.id == slack || !nd.phases.has(p)) inj[size_t(3 * nd.id + p)] = cx{};
    }
  }
}

}  // namespace

bool scenario_consistent(const BlockMatrix& y, const std::vector<PhaseMask>& phases,
                         int slack, const Scenario& sc, double tol) {
  const double r = anchored_residual(y, phases, slack, sc.voltages, sc.injections);
  return r <= tol * std::max(1.0, inf_norm(sc.injections));
}

Scenario scenario_from_currents(const Network& net, const AnchoredSolver& solver,
                                std::vector<cx> injections, std::string id,
                                const ScenarioTolerances&) {
  if (int(injections.size()) != 3 * net.size())
    throw ValidationError("scenario '" + id + "': injection vector has wrong length");
  zero_invalid_entries(net, injections);
  Scenario sc;
  sc.id = std::move(id);
  sc.voltages = solver.solve(injections);
  sc.injections = std::move(injections);
  return sc;
}

Scenario scenario_from_pq(const Network& net, const AnchoredSolver& solver,
                          const std::vector<PqLoad>& loads, std::string id,
                          const ScenarioTolerances& tol) {
  const int n = net.size();
  const int slack = net.slack_id();
  std::vector<cx> s(size_t(3 * n), cx{});
  for (const PqLoad& ld : loads) {
    if (ld.node < 0 || ld.node >= n)
      throw ValidationError("scenario '" + id + "': load at unknown node " +
                            std::to_string(ld.node));
    if (ld.phase < 0 || ld.phase > 2 || !net.nodes[size_t(ld.node)].phases.has(ld.phase))
      throw ValidationError("scenario '" + id + "': load at absent phase " +
                            std::string(1, char('a' + ld.phase)) + " of node " +
                            std::to_string(ld.node));
    if (ld.node == slack)
      throw ValidationError("scenario '" + id + "': load placed at the slack node");
    s[size_t(3 * ld.node + ld.phase)] += ld.s;
  }

  // constant-current conversion: I = -conj(S / V), fixed point on V
  std::vector<cx> v = solver.zero_injection_solution();
  std::vector<cx> inj(size_t(3 * n), cx{});
  double dv = 0;
  for (int it = 0; it < tol.pq_max_iter; ++it) {
    for (size_t k = 0; k < s.size(); ++k) {
      if (s[k] == cx{}) continue;
      if (std::abs(v[k]) < 1e-6)
        throw SolverError("scenario '" + id + "': voltage collapse during PQ conversion");
      inj[k] = -std::conj(s[k] / v[k]);
    }
    std::vector<cx> v_next = solver.solve(inj);
    dv = 0;
    for (size_t k = 0; k < v.size(); ++k) dv = std::max(dv, std::abs(v_next[k] - v[k]));
    v = std::move(v_next);
    if (dv < tol.pq_fixed_point) {
      Scenario sc;
      sc.id = std::move(id);
      sc.injections = std::move(inj);
      sc.voltages = std::move(v);
      return sc;
    }
  }
  std::ostringstream os;
  os << "scenario '" << id << "': PQ fixed point did not converge in " << tol.pq_max_iter
     << " iterations (last update " << dv << ")";
  throw SolverError(os.str());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (std::string& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
  }
  return out;
}

int parse_phase(const std::string& s, const std::string& ctx) {
  if (s == "a") return 0;
  if (s == "b") return 1;
  if (s == "c") return 2;
  throw ValidationError(ctx + ": bad phase '" + s + "' (want a|b|c)");
}

double parse_num(const std::string& s, const std::string& ctx) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(ctx + ": bad number '" + s + "'");
  }
}

}  // namespace

ScenarioLibrary load_library(const Network& net, const std::string& path,
                             const ScenarioTolerances& tol) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");

  std::string line;
  std::string header;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    header = line;
    have_header = true;
    break;
  }
  if (!have_header) {
    ScenarioLibrary empty_lib;
    empty_lib.n = net.size();
    return empty_lib;  // empty file: empty library, rejected downstream
  }
  const auto hf = split_csv(header);
  bool pq_mode;
  if (hf == std::vector<std::string>{"scenario_id", "node_id", "phase", "p_pu", "q_pu"})
    pq_mode = true;
  else if (hf == std::vector<std::string>{"scenario_id", "node_id", "phase", "i_re", "i_im"})
    pq_mode = false;
  else
    throw ValidationError("scenario file '" + path + "': unrecognized header '" + header + "'");

  struct Rows {
    std::string id;
    std::vector<PqLoad> pq;
    std::vector<cx> inj;
  };
  std::vector<Rows> groups;
  std::map<std::string, size_t> group_of;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const std::string ctx = path + ":" + std::to_string(lineno);
    const auto f = split_csv(line);
    if (f.size() != 5) throw ValidationError(ctx + ": expected 5 columns, got " +
                                             std::to_string(f.size()));
    auto [it, fresh] = group_of.try_emplace(f[0], groups.size());
    if (fresh) {
      groups.push_back({f[0], {}, std::vector<cx>(size_t(3 * net.size()), cx{})});
    }
    Rows& g = groups[it->second];
    const int node = int(parse_num(f[1], ctx));
    const int phase = parse_phase(f[2], ctx);
    if (node < 0 || node >= net.size())
      throw ValidationError(ctx + ": unknown node " + f[1]);
    if (!net.nodes[size_t(node)].phases.has(phase))
      throw ValidationError(ctx + ": phase " + f[2] + " absent at node " + f[1]);
    const double x0 = parse_num(f[3], ctx);
    const double x1 = parse_num(f[4], ctx);
    if (pq_mode)
      g.pq.push_back({node, phase, cx{x0, x1}});
    else
      g.inj[size_t(3 * node + phase)] += cx{x0, x1};
  }

  const BlockAdmittance y = assemble_admittance(net);
  const auto masks = phase_masks(net);
  const int slack = net.slack_id();
  const AnchoredSolver solver(y, masks, slack, net.nodes[size_t(slack)].slack_voltage);

  ScenarioLibrary lib;
  lib.n = net.size();
  for (Rows& g : groups) {
    Scenario sc = pq_mode ? scenario_from_pq(net, solver, g.pq, g.id, tol)
                          : scenario_from_currents(net, solver, std::move(g.inj), g.id, tol);
    if (!scenario_consistent(y, masks, slack, sc, tol.residual))
      throw SolverError("scenario '" + sc.id + "' failed the residual check");
    lib.scenarios.push_back(std::move(sc));
  }
  return lib;
}

}  // namespace kronred
