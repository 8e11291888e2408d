// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "kronred/feeder_gen.hpp"
#include "kronred/network.hpp"
#include "kronred/reduce.hpp"

namespace kronred {

// --- network JSON -----------------------------------------------------------
// {nodes:[{id, phases:"abc", slack:bool, slack_voltage:[[re,im]x3]?}],
//  branches:[{from, to, z_block|y_block:[[re,im]x9], shunt_from?, shunt_to?}]}
// Blocks row-major, per-unit. Impedance blocks are inverted on the
// present-phase submatrix at load time.

Network read_network_json(const std::string& path);
Network parse_network_json(const std::string& text);
void write_network_json(const Network& net, const std::string& path);
std::string network_json_string(const Network& net);

// --- scenario CSV ------------------------------------------------------------
// header `scenario_id,node_id,phase,p_pu,q_pu`  (constant-PQ, positive = load)
// or     `scenario_id,node_id,phase,i_re,i_im`  (constant-current injections)

void write_scenario_csv(const std::string& path, const GeneratedLoads& loads);

// --- reduced model JSON ------------------------------------------------------

ReducedModel read_reduced_json(const std::string& path);
ReducedModel parse_reduced_json(const std::string& text);
void write_reduced_json(const ReducedModel& model, const std::string& path);
std::string reduced_json_string(const ReducedModel& model);

// --- trace CSV ---------------------------------------------------------------
// One row per committed iteration plus a terminal `final` row carrying the
// model's definitive per-scenario errors from the reduced solve.

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace,
                     const std::vector<std::string>& scenario_ids,
                     const std::vector<double>& final_max_err,
                     const std::vector<std::string>& header_comments = {});

// --- run manifest ------------------------------------------------------------

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> inputs;   // name -> path
  std::map<std::string, std::string> outputs;  // name -> path
  std::map<std::string, std::string> config;   // flag -> value
  std::string tool_version;
  double wall_ms = 0;
};

void write_manifest_json(const RunManifest& m, const std::string& path);

// --- validation report -------------------------------------------------------

struct ValidateReport {
  std::vector<std::string> scenario_ids;
  std::vector<double> max_err;       // per scenario
  std::vector<double> bin_edges;     // histogram over max_err, size bins+1
  std::vector<int> bin_counts;       // size bins
};

ValidateReport make_validate_report(const ReducedModel& model, const Network& net,
                                    const ScenarioLibrary& lib, int bins = 20);
void write_validate_report(const ValidateReport& rep, const std::string& path);

// 17-significant-digit float formatting shared by all writers.
std::string format_double(double v);

}  // namespace kronred
