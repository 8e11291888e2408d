// SPDX-License-Identifier: Apache-2.0
#include "kronred/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kronred/errors.hpp"

namespace kronred {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string jstr(const std::string& s) { return "\"" + escape(s) + "\""; }

std::string pair_json(const cx& z) {
  return "[" + format_double(z.real()) + "," + format_double(z.imag()) + "]";
}

std::string block_json(const Mat3c& b) {
  std::string s = "[";
  for (int k = 0; k < 9; ++k) {
    if (k > 0) s += ",";
    s += pair_json(b.m[size_t(k)]);
  }
  return s + "]";
}

std::string vec3_json(const Vec3c& v) {
  std::string s = "[";
  for (int k = 0; k < 3; ++k) {
    if (k > 0) s += ",";
    s += pair_json(v[k]);
  }
  return s + "]";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ValidationError("short write to '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cx parse_pair(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError(ctx + ": expected [re,im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Mat3c parse_block(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 9)
    throw ValidationError(ctx + ": expected 9 [re,im] pairs, row-major");
  Mat3c b;
  for (int k = 0; k < 9; ++k) b.m[size_t(k)] = parse_pair(j[size_t(k)], ctx);
  return b;
}

json parse_json_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError(what + ": malformed JSON");
  return j;
}

}  // namespace

// --- network -----------------------------------------------------------------

Network parse_network_json(const std::string& text) {
  const json j = parse_json_text(text, "network");
  if (!j.contains("nodes") || !j["nodes"].is_array())
    throw ValidationError("network: missing 'nodes' array");
  if (!j.contains("branches") || !j["branches"].is_array())
    throw ValidationError("network: missing 'branches' array");

  Network net;
  for (const json& nj : j["nodes"]) {
    Node nd;
    if (!nj.contains("id") || !nj["id"].is_number_integer())
      throw ValidationError("network: node without integer id");
    nd.id = nj["id"].get<int>();
    if (!nj.contains("phases") || !nj["phases"].is_string())
      throw ValidationError("network: node " + std::to_string(nd.id) + " without phases");
    nd.phases = PhaseMask::parse(nj["phases"].get<std::string>());
    nd.is_slack = nj.value("slack", false);
    if (nd.is_slack) {
      if (nj.contains("slack_voltage")) {
        const json& sv = nj["slack_voltage"];
        if (!sv.is_array() || sv.size() != 3)
          throw ValidationError("network: slack_voltage needs 3 [re,im] pairs");
        for (int p = 0; p < 3; ++p)
          nd.slack_voltage[p] = parse_pair(sv[size_t(p)], "slack_voltage");
      } else {
        nd.slack_voltage = nominal_slack_voltage();
      }
    }
    net.nodes.push_back(nd);
  }
  std::sort(net.nodes.begin(), net.nodes.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });

  for (const json& bj : j["branches"]) {
    Branch b;
    if (!bj.contains("from") || !bj.contains("to"))
      throw ValidationError("network: branch without endpoints");
    b.from = bj["from"].get<int>();
    b.to = bj["to"].get<int>();
    const std::string ctx = "branch (" + std::to_string(b.from) + "," + std::to_string(b.to) + ")";
    if (b.from < 0 || b.from >= net.size() || b.to < 0 || b.to >= net.size())
      throw ValidationError(ctx + ": unknown endpoint");
    const bool has_z = bj.contains("z_block");
    const bool has_y = bj.contains("y_block");
    if (has_z == has_y)
      throw ValidationError(ctx + ": exactly one of z_block / y_block required");
    const PhaseMask common =
        net.nodes[size_t(b.from)].phases.intersect(net.nodes[size_t(b.to)].phases);
    if (has_y) {
      b.y_series = parse_block(bj["y_block"], ctx).masked(common);
    } else {
      const Mat3c z = parse_block(bj["z_block"], ctx).masked(common);
      double pivot = 0;
      if (!masked_inverse(z, common, b.y_series, pivot))
        throw ValidationError(ctx + ": z_block singular on the common phases");
    }
    if (bj.contains("shunt_from"))
      b.shunt_from = parse_block(bj["shunt_from"], ctx).masked(net.nodes[size_t(b.from)].phases);
    if (bj.contains("shunt_to"))
      b.shunt_to = parse_block(bj["shunt_to"], ctx).masked(net.nodes[size_t(b.to)].phases);
    net.branches.push_back(b);
  }
  return net;
}

Network read_network_json(const std::string& path) { return parse_network_json(read_text(path)); }

std::string network_json_string(const Network& net) {
  std::ostringstream os;
  os << "{\n  \"nodes\": [\n";
  for (size_t i = 0; i < net.nodes.size(); ++i) {
    const Node& nd = net.nodes[i];
    os << "    {\"id\": " << nd.id << ", \"phases\": " << jstr(nd.phases.str())
       << ", \"slack\": " << (nd.is_slack ? "true" : "false");
    if (nd.is_slack) os << ", \"slack_voltage\": " << vec3_json(nd.slack_voltage);
    os << "}" << (i + 1 < net.nodes.size() ? "," : "") << "\n";
  }
  os << "  ],\n  \"branches\": [\n";
  for (size_t i = 0; i < net.branches.size(); ++i) {
    const Branch& b = net.branches[i];
    os << "    {\"from\": " << b.from << ", \"to\": " << b.to
       << ", \"y_block\": " << block_json(b.y_series);
    if (!b.shunt_from.is_zero()) os << ", \"shunt_from\": " << block_json(b.shunt_from);
    if (!b.shunt_to.is_zero()) os << ", \"shunt_to\": " << block_json(b.shunt_to);
    os << "}" << (i + 1 < net.branches.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

void write_network_json(const Network& net, const std::string& path) {
  write_text(path, network_json_string(net));
}

// --- scenario CSV --------------------------------------------------------------

void write_scenario_csv(const std::string& path, const GeneratedLoads& loads) {
  std::ostringstream os;
  os << "scenario_id,node_id,phase,p_pu,q_pu\n";
  for (size_t l = 0; l < loads.scenario_scale.size(); ++l) {
    const double f = loads.scenario_scale[l];
    for (const PqLoad& ld : loads.base) {
      os << "s" << l << "," << ld.node << "," << char('a' + ld.phase) << ","
         << format_double(ld.s.real() * f) << "," << format_double(ld.s.imag() * f) << "\n";
    }
  }
  write_text(path, os.str());
}

// --- reduced model ---------------------------------------------------------------

std::string reduced_json_string(const ReducedModel& m) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"radial\": " << (m.radial ? "true" : "false") << ",\n";
  os << "  \"e_bar\": " << format_double(m.e_bar) << ",\n";
  os << "  \"objective\": " << (m.objective == Objective::magnitude ? "\"mag\"" : "\"complex\"")
     << ",\n";
  os << "  \"scenario_ids\": [";
  for (size_t i = 0; i < m.scenario_ids.size(); ++i)
    os << (i ? "," : "") << jstr(m.scenario_ids[i]);
  os << "],\n";
  os << "  \"kept\": [";
  for (size_t i = 0; i < m.kept_ids.size(); ++i) {
    os << (i ? "," : "") << "{\"id\": " << m.kept_ids[i] << ", \"phases\": "
       << jstr(m.kept_phases[i].str()) << "}";
  }
  os << "],\n";
  os << "  \"reinserted\": [";
  for (size_t i = 0; i < m.reinserted.size(); ++i) os << (i ? "," : "") << m.reinserted[i];
  os << "],\n";
  os << "  \"clusters\": {";
  {
    size_t k = 0;
    for (const auto& [sup, mem] : m.clusters) {
      os << (k++ ? "," : "") << "\n    \"" << sup << "\": [";
      for (size_t i = 0; i < mem.size(); ++i) os << (i ? "," : "") << mem[i];
      os << "]";
    }
  }
  os << "\n  },\n";
  os << "  \"errors\": [";
  for (size_t i = 0; i < m.final_max_err.size(); ++i) {
    os << (i ? "," : "") << "\n    {\"scenario_id\": "
       << jstr(i < m.scenario_ids.size() ? m.scenario_ids[i] : std::to_string(i))
       << ", \"max_err\": " << format_double(m.final_max_err[i]) << "}";
  }
  os << "\n  ],\n";
  os << "  \"y_kron\": [";
  {
    size_t k = 0;
    for (int i = 0; i < m.y_kron.n(); ++i) {
      for (const auto& [j, blk] : m.y_kron.row(i)) {
        os << (k++ ? "," : "") << "\n    {\"i\": " << m.kept_ids[size_t(i)]
           << ", \"j\": " << m.kept_ids[size_t(j)] << ", \"block\": " << block_json(blk) << "}";
      }
    }
  }
  os << "\n  ]\n}\n";
  return os.str();
}

void write_reduced_json(const ReducedModel& m, const std::string& path) {
  write_text(path, reduced_json_string(m));
}

ReducedModel parse_reduced_json(const std::string& text) {
  const json j = parse_json_text(text, "reduced model");
  ReducedModel m;
  m.radial = j.value("radial", false);
  if (!j.contains("e_bar") || !j["e_bar"].is_number())
    throw ValidationError("reduced model: missing e_bar");
  m.e_bar = j["e_bar"].get<double>();
  const std::string obj = j.value("objective", "mag");
  if (obj == "mag")
    m.objective = Objective::magnitude;
  else if (obj == "complex")
    m.objective = Objective::complex_error;
  else
    throw ValidationError("reduced model: unknown objective '" + obj + "'");
  if (j.contains("scenario_ids"))
    for (const json& s : j["scenario_ids"]) m.scenario_ids.push_back(s.get<std::string>());

  if (!j.contains("kept") || !j["kept"].is_array() || j["kept"].empty())
    throw ValidationError("reduced model: missing kept node list");
  for (const json& kj : j["kept"]) {
    m.kept_ids.push_back(kj.at("id").get<int>());
    m.kept_phases.push_back(PhaseMask::parse(kj.at("phases").get<std::string>()));
  }
  // positions assume ascending kept ids
  for (size_t i = 1; i < m.kept_ids.size(); ++i)
    if (m.kept_ids[i] <= m.kept_ids[i - 1])
      throw ValidationError("reduced model: kept ids must be strictly ascending");

  if (j.contains("reinserted"))
    for (const json& r : j["reinserted"]) m.reinserted.push_back(r.get<int>());

  if (!j.contains("clusters") || !j["clusters"].is_object())
    throw ValidationError("reduced model: missing clusters");
  for (auto it = j["clusters"].begin(); it != j["clusters"].end(); ++it) {
    const int sup = std::stoi(it.key());
    std::vector<int> mem;
    for (const json& v : it.value()) mem.push_back(v.get<int>());
    m.clusters[sup] = std::move(mem);
  }

  if (j.contains("errors"))
    for (const json& e : j["errors"]) m.final_max_err.push_back(e.at("max_err").get<double>());

  auto pos_of = [&](int id) {
    auto it = std::lower_bound(m.kept_ids.begin(), m.kept_ids.end(), id);
    if (it == m.kept_ids.end() || *it != id)
      throw ValidationError("reduced model: y_kron references non-kept node " +
                            std::to_string(id));
    return int(it - m.kept_ids.begin());
  };
  m.y_kron = BlockMatrix(int(m.kept_ids.size()));
  if (!j.contains("y_kron") || !j["y_kron"].is_array())
    throw ValidationError("reduced model: missing y_kron");
  for (const json& bj : j["y_kron"]) {
    const int i = pos_of(bj.at("i").get<int>());
    const int jj = pos_of(bj.at("j").get<int>());
    m.y_kron.block(i, jj) = parse_block(bj.at("block"), "y_kron");
  }
  return m;
}

ReducedModel read_reduced_json(const std::string& path) {
  return parse_reduced_json(read_text(path));
}

// --- trace CSV -------------------------------------------------------------------

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace,
                     const std::vector<std::string>& scenario_ids,
                     const std::vector<double>& final_max_err,
                     const std::vector<std::string>& header_comments) {
  std::ostringstream os;
  for (const std::string& c : header_comments) os << "# " << c << "\n";
  os << "iteration,s,r,smice";
  for (const std::string& sid : scenario_ids) os << ",max_err_" << sid;
  os << ",supernode_count,candidate_count,wall_time_ms\n";
  for (const TraceRow& row : trace) {
    os << row.iteration << "," << row.s << "," << row.r << "," << format_double(row.smice);
    for (double e : row.max_err) os << "," << format_double(e);
    os << "," << row.supernode_count << "," << row.candidate_count << ","
       << format_double(row.wall_ms) << "\n";
  }
  os << "final,,,";
  for (double e : final_max_err) os << "," << format_double(e);
  os << ",";
  if (!trace.empty()) os << trace.back().supernode_count;
  os << ",,\n";
  write_text(path, os.str());
}

// --- manifest --------------------------------------------------------------------

void write_manifest_json(const RunManifest& m, const std::string& path) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"command\": " << jstr(m.command) << ",\n";
  os << "  \"tool_version\": " << jstr(m.tool_version) << ",\n";
  auto emit_map = [&os](const char* name, const std::map<std::string, std::string>& mp,
                        bool last = false) {
    os << "  \"" << name << "\": {";
    size_t k = 0;
    for (const auto& [key, val] : mp) os << (k++ ? ", " : "") << jstr(key) << ": " << jstr(val);
    os << "}" << (last ? "\n" : ",\n");
  };
  emit_map("inputs", m.inputs);
  emit_map("outputs", m.outputs);
  emit_map("config", m.config);
  os << "  \"wall_ms\": " << format_double(m.wall_ms) << "\n";
  os << "}\n";
  write_text(path, os.str());
}

// --- validation report -------------------------------------------------------------

ValidateReport make_validate_report(const ReducedModel& model, const Network& net,
                                    const ScenarioLibrary& lib, int bins) {
  ValidateReport rep;
  rep.scenario_ids = lib.ids();
  rep.max_err = model_max_errors(model, net, lib);
  if (bins < 1) bins = 1;
  double hi = 0;
  for (double e : rep.max_err) hi = std::max(hi, e);
  if (hi <= 0) hi = 1e-12;
  hi *= 1.0 + 1e-12;
  rep.bin_edges.resize(size_t(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    rep.bin_edges[size_t(b)] = hi * double(b) / double(bins);
  rep.bin_counts.assign(size_t(bins), 0);
  for (double e : rep.max_err) {
    int b = int(e / hi * bins);
    b = std::clamp(b, 0, bins - 1);
    ++rep.bin_counts[size_t(b)];
  }
  return rep;
}

void write_validate_report(const ValidateReport& rep, const std::string& path) {
  std::ostringstream os;
  os << "record,scenario_id,max_err,bin_lo,bin_hi,count\n";
  for (size_t i = 0; i < rep.scenario_ids.size(); ++i)
    os << "scenario," << rep.scenario_ids[i] << "," << format_double(rep.max_err[i]) << ",,,\n";
  for (size_t b = 0; b < rep.bin_counts.size(); ++b)
    os << "hist,,," << format_double(rep.bin_edges[b]) << "," << format_double(rep.bin_edges[b + 1])
       << "," << rep.bin_counts[b] << "\n";
  write_text(path, os.str());
}

}  // namespace kronred
