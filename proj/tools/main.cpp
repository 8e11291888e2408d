// SPDX-License-Identifier: Apache-2.0
//
// kronred CLI: generate synthetic feeders, run the reduction, validate
// reduced models against scenario libraries.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kronred/feeder_gen.hpp"
#include "kronred/grid_model.hpp"
#include "kronred/io.hpp"
#include "kronred/parallel.hpp"
#include "kronred/radialize.hpp"
#include "kronred/reduce.hpp"
#include "kronred/version.hpp"

namespace {

using namespace kronred;

int cmd_generate(const GenParams& params, const std::string& net_path,
                 const std::string& scen_path) {
  GeneratedLoads loads;
  auto [net, lib] = generate(params, loads);
  (void)lib;
  write_network_json(net, net_path);
  write_scenario_csv(scen_path, loads);
  std::cout << "wrote " << net_path << " (" << net.size() << " nodes) and " << scen_path
            << " (" << loads.scenario_scale.size() << " scenarios)\n";
  return 0;
}

struct ReduceArgs {
  std::string net_path, scen_path;
  std::string out_reduced = "reduced.json";
  std::string out_trace = "trace.csv";
  std::string out_manifest = "manifest.json";
  double e_bar = 1e-3;
  std::string objective = "mag";
  int workers = 0;
  bool radialize_flag = false;
  std::optional<double> target;
  bool seed_trace = false;
};

int cmd_reduce(const ReduceArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();

  const Network net = read_network_json(args.net_path);
  validate_or_throw(net);
  const ScenarioLibrary lib = load_library(net, args.scen_path);

  ReductionConfig cfg;
  cfg.e_bar = args.e_bar;
  if (args.objective == "mag")
    cfg.objective = Objective::magnitude;
  else if (args.objective == "complex")
    cfg.objective = Objective::complex_error;
  else
    throw ConfigError("--objective must be 'mag' or 'complex'");
  cfg.workers = args.workers > 0 ? args.workers : default_workers();
  cfg.target_reduction = args.target;

  ReductionResult result = run_reduction(net, lib, cfg);
  ReducedModel model = std::move(result.model);
  if (args.radialize_flag) {
    const BlockAdmittance y = assemble_admittance(net);
    model = radialize(model, net, y, &lib);
  }

  write_reduced_json(model, args.out_reduced);

  std::vector<std::string> comments;
  if (args.seed_trace) {
    comments.push_back("tool_version=" + std::string(kVersion));
    comments.push_back("network=" + args.net_path);
    comments.push_back("scenarios=" + args.scen_path);
    comments.push_back("e_bar=" + format_double(args.e_bar));
    comments.push_back("objective=" + args.objective);
    comments.push_back("workers=" + std::to_string(cfg.workers));
    comments.push_back("radialize=" + std::string(args.radialize_flag ? "true" : "false"));
    if (args.target) comments.push_back("target_reduction=" + format_double(*args.target));
  }
  write_trace_csv(args.out_trace, result.trace, model.scenario_ids, model.final_max_err,
                  comments);

  const auto t1 = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.command = "reduce";
  manifest.tool_version = kVersion;
  manifest.inputs = {{"network", args.net_path}, {"scenarios", args.scen_path}};
  manifest.outputs = {{"reduced", args.out_reduced},
                      {"trace", args.out_trace},
                      {"manifest", args.out_manifest}};
  manifest.config = {{"e_bar", format_double(args.e_bar)},
                     {"objective", args.objective},
                     {"workers", std::to_string(cfg.workers)},
                     {"radialize", args.radialize_flag ? "true" : "false"},
                     {"target_reduction", args.target ? format_double(*args.target) : "none"},
                     {"seed_trace", args.seed_trace ? "true" : "false"}};
  manifest.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  write_manifest_json(manifest, args.out_manifest);

  const int n = net.size();
  const int kept = int(model.kept_ids.size());
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.1f", 100.0 * double(n - kept) / double(n));
  std::cout << "reduced " << n << " -> " << kept << " nodes (" << pct << "% reduction, "
            << result.trace.size() << " iterations)\n";
  for (size_t l = 0; l < model.final_max_err.size(); ++l)
    std::cout << "  max |dV| " << model.scenario_ids[l] << ": "
              << format_double(model.final_max_err[l]) << "\n";
  return 0;
}

int cmd_validate(const std::string& net_path, const std::string& reduced_path,
                 const std::string& scen_path, const std::string& out_path, int bins) {
  const Network net = read_network_json(net_path);
  validate_or_throw(net);
  const ReducedModel model = read_reduced_json(reduced_path);
  const ScenarioLibrary lib = load_library(net, scen_path);
  const ValidateReport rep = make_validate_report(model, net, lib, bins);
  write_validate_report(rep, out_path);
  double worst = 0;
  for (double e : rep.max_err) worst = std::max(worst, e);
  std::cout << "validated " << lib.size() << " scenarios, worst max |dV| = "
            << format_double(worst) << " (report: " << out_path << ")\n";
  return 0;
}

int cmd_info(const std::string& net_path, const std::string& scen_path,
             const std::string& reduced_path) {
  if (!net_path.empty()) {
    const Network net = read_network_json(net_path);
    const ValidationReport rep = validate(net);
    int three = 0, two = 0, one = 0;
    for (const Node& nd : net.nodes) {
      const int c = nd.phases.count();
      (c == 3 ? three : c == 2 ? two : one) += 1;
    }
    std::cout << "network: " << net.size() << " nodes (" << three << " three-phase, " << two
              << " two-phase, " << one << " single-phase), " << net.branches.size()
              << " branches, slack " << net.slack_id() << "\n";
    std::cout << "valid: " << (rep.ok() ? "yes" : "no") << "\n";
    if (!rep.ok()) std::cout << rep.to_string();
    if (!scen_path.empty()) {
      const ScenarioLibrary lib = load_library(net, scen_path);
      std::cout << "scenarios: " << lib.size() << "\n";
    }
  }
  if (!reduced_path.empty()) {
    const ReducedModel model = read_reduced_json(reduced_path);
    std::cout << "reduced model: " << model.kept_ids.size() << " kept nodes, radial "
              << (model.radial ? "true" : "false") << ", e_bar " << format_double(model.e_bar)
              << ", reinserted " << model.reinserted.size() << "\n";
    for (size_t l = 0; l < model.final_max_err.size(); ++l)
      std::cout << "  max |dV| "
                << (l < model.scenario_ids.size() ? model.scenario_ids[l] : std::to_string(l))
                << ": " << format_double(model.final_max_err[l]) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal Kron-based reduction of three-phase radial feeders"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic feeder and scenario library");
  GenParams params;
  std::string gen_net = "net.json", gen_scen = "scenarios.csv";
  gen->add_option("-n,--nodes", params.n, "node count");
  gen->add_option("--seed", params.seed, "random seed");
  gen->add_option("--scenarios", params.scenario_count, "scenario count");
  gen->add_option("--spread", params.scenario_spread, "scenario load scaling spread");
  gen->add_option("--branching", params.branching, "branching probability");
  gen->add_option("--frac-two-phase", params.frac_two_phase, "two-phase lateral fraction");
  gen->add_option("--frac-single-phase", params.frac_single_phase, "single-phase lateral fraction");
  gen->add_option("--load-min", params.load_p_min, "min active load per node-phase (p.u.)");
  gen->add_option("--load-max", params.load_p_max, "max active load per node-phase (p.u.)");
  gen->add_option("--out-network", gen_net, "output network JSON path");
  gen->add_option("--out-scenarios", gen_scen, "output scenario CSV path");

  // reduce
  auto* red = app.add_subcommand("reduce", "run the reduction on a feeder");
  ReduceArgs rargs;
  red->add_option("network", rargs.net_path, "network JSON")->required();
  red->add_option("scenarios", rargs.scen_path, "scenario CSV")->required();
  red->add_option("--e-bar", rargs.e_bar, "voltage magnitude error bound (p.u.)");
  red->add_option("--objective", rargs.objective, "mag | complex");
  red->add_option("--workers", rargs.workers,
                  "parallel evaluation workers (default: KRONRED_WORKERS or 1)");
  red->add_flag("--radialize", rargs.radialize_flag, "re-insert critical nodes to restore a tree");
  double target = -1;
  red->add_option("--target-reduction", target, "stop at this reduction fraction")
      ->check(CLI::Range(0.0, 1.0));
  red->add_flag("--seed-trace", rargs.seed_trace, "echo the run configuration into the trace");
  red->add_option("--out", rargs.out_reduced, "reduced model JSON path");
  red->add_option("--trace", rargs.out_trace, "trace CSV path");
  red->add_option("--manifest", rargs.out_manifest, "manifest JSON path");

  // validate
  auto* val = app.add_subcommand("validate", "score a reduced model against scenarios");
  std::string v_net, v_reduced, v_scen, v_out = "report.csv";
  int v_bins = 20;
  val->add_option("network", v_net, "network JSON")->required();
  val->add_option("reduced", v_reduced, "reduced model JSON")->required();
  val->add_option("scenarios", v_scen, "scenario CSV")->required();
  val->add_option("--out", v_out, "report CSV path");
  val->add_option("--bins", v_bins, "histogram bin count");

  // info
  auto* inf = app.add_subcommand("info", "summarize inputs and artifacts");
  std::string i_net, i_scen, i_reduced;
  inf->add_option("--network", i_net, "network JSON");
  inf->add_option("--scenarios", i_scen, "scenario CSV (needs --network)");
  inf->add_option("--reduced", i_reduced, "reduced model JSON");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_generate(params, gen_net, gen_scen);
    if (red->parsed()) {
      if (target >= 0) rargs.target = target;
      return cmd_reduce(rargs);
    }
    if (val->parsed()) return cmd_validate(v_net, v_reduced, v_scen, v_out, v_bins);
    if (inf->parsed()) return cmd_info(i_net, i_scen, i_reduced);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const kronred::SolverError& e) {
    std::cerr << "error (solver): " << e.what() << "\n";
    return 3;
  } catch (const kronred::ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
