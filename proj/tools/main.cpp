// Experiment front end: solve instance files, certify them against the
// brute-force reference, and run the convergence / sweep studies as CSV.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nomamec/baselines.hpp"
#include "nomamec/experiments.hpp"
#include "nomamec/json_io.hpp"
#include "nomamec/oracle.hpp"
#include "nomamec/util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

struct CommonArgs {
  std::uint64_t seed = 0;
  double xi = 1e-4;
  int max_iter = 100;
  std::string out_path;
  std::string scenario_path;
};

nomamec::ScenarioSpec resolve_scenario(const CommonArgs& args, int users_override) {
  nomamec::ScenarioSpec spec;
  if (!args.scenario_path.empty()) spec = nomamec::load_scenario(args.scenario_path);
  spec.seed = args.seed;
  if (users_override > 0) spec.n_users = users_override;
  return spec;
}

void print_summary(const nomamec::SolveResult& result) {
  const auto& trace = result.trace;
  std::cout << "objective_joules: " << nomamec::format_sci(trace.objective_j.back()) << "\n"
            << "iterations: " << trace.iterations() << "\n"
            << "kkt_residual: " << nomamec::format_sci(trace.kkt_residual) << "\n"
            << "termination: "
            << (trace.termination == nomamec::Termination::kConverged ? "converged"
                                                                      : "max_iterations")
            << "\n"
            << "wall_time_s: " << nomamec::format_sci(trace.wall_time_s) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimal slot and offload allocation for two-user uplink groups"};
  app.require_subcommand(1);

  CommonArgs common;
  int users_override = 0;

  auto add_common = [&](CLI::App* cmd, bool with_solver_flags = true) {
    cmd->add_option("--seed", common.seed, "base RNG seed");
    cmd->add_option("--out", common.out_path, "output path (default: stdout)");
    cmd->add_option("--scenario", common.scenario_path, "scenario spec JSON");
    cmd->add_option("--users", users_override, "override scenario user count");
    if (with_solver_flags) {
      cmd->add_option("--xi", common.xi, "relative convergence tolerance");
      cmd->add_option("--max-iter", common.max_iter, "iteration cap");
    }
  };

  // solve
  std::string instance_path;
  std::string dump_instance_path;
  bool with_baselines = false;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one instance, write the trace CSV");
  solve_cmd->add_option("instance", instance_path, "instance JSON (omit to generate)");
  solve_cmd->add_option("--dump-instance", dump_instance_path,
                        "write the generated instance JSON here");
  solve_cmd->add_flag("--baselines", with_baselines,
                      "also report equal-resource and per-user baselines");
  add_common(solve_cmd);

  // oracle
  std::string oracle_instance_path;
  int oracle_steps = 64;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "certify an instance against the exhaustive reference");
  oracle_cmd->add_option("instance", oracle_instance_path, "instance JSON")->required();
  oracle_cmd->add_option("--steps", oracle_steps, "grid steps per dimension");
  add_common(oracle_cmd);

  // converge
  std::vector<double> f_values{4e9, 6e9, 8e9};
  CLI::App* converge_cmd =
      app.add_subcommand("converge", "trace convergence under several cloud capacities");
  converge_cmd->add_option("--f-values", f_values, "cloud capacities (cycles)")
      ->delimiter(',');
  add_common(converge_cmd);

  // sweep
  std::string sweep_variable = "deadline_T";
  std::vector<double> sweep_values;
  int n_instances = 10;
  std::vector<std::string> scheme_names{"proposed", "equal", "oma"};
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "mean energy versus a swept parameter");
  sweep_cmd->add_option("--variable", sweep_variable, "deadline_T | cloud_F");
  sweep_cmd->add_option("--values", sweep_values, "swept values, strictly increasing")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--n-instances", n_instances, "networks per sweep point");
  sweep_cmd->add_option("--schemes", scheme_names, "subset of proposed,equal,oma")
      ->delimiter(',');
  add_common(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  try {
    nomamec::SolveOptions options{common.xi, common.max_iter};

    if (solve_cmd->parsed()) {
      nomamec::ProblemInstance instance;
      if (!instance_path.empty()) {
        instance = nomamec::load_instance(instance_path);
      } else {
        instance = nomamec::generate(resolve_scenario(common, users_override));
      }
      if (!dump_instance_path.empty()) nomamec::save_instance(instance, dump_instance_path);
      const nomamec::SolveResult result = nomamec::solve(instance, options);
      print_summary(result);
      if (with_baselines) {
        std::cout << "equal_resource_joules: "
                  << nomamec::format_sci(
                         nomamec::equal_resource_solve(instance).report.total_j)
                  << "\n"
                  << "oma_joules: "
                  << nomamec::format_sci(nomamec::oma_solve(instance, options).report.total_j)
                  << "\n";
      }
      if (!common.out_path.empty()) write_output(nomamec::trace_to_csv(result.trace), common.out_path);
      return kExitOk;
    }

    if (oracle_cmd->parsed()) {
      const nomamec::ProblemInstance instance = nomamec::load_instance(oracle_instance_path);
      const nomamec::OracleResult oracle = nomamec::grid_oracle(instance, oracle_steps);
      const nomamec::SolveResult result = nomamec::solve(instance, options);
      const double gap = result.report.total_j - oracle.best_objective_j;
      std::cout << "oracle_best_joules: " << nomamec::format_sci(oracle.best_objective_j) << "\n"
                << "resolution_bound_joules: "
                << nomamec::format_sci(oracle.resolution_bound_j) << "\n"
                << "solver_joules: " << nomamec::format_sci(result.report.total_j) << "\n"
                << "gap_joules: " << nomamec::format_sci(gap) << "\n"
                << "within_bound: " << (std::abs(gap) <= oracle.resolution_bound_j ? "yes" : "no")
                << "\n";
      return kExitOk;
    }

    if (converge_cmd->parsed()) {
      nomamec::ConvergeConfig config;
      config.scenario = resolve_scenario(common, users_override);
      config.cloud_capacities = f_values;
      config.options = options;
      write_output(nomamec::run_convergence(config), common.out_path);
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      nomamec::SweepSpec spec;
      if (sweep_variable == "deadline_T")
        spec.variable = nomamec::SweepVariable::kDeadlineT;
      else if (sweep_variable == "cloud_F")
        spec.variable = nomamec::SweepVariable::kCloudF;
      else
        throw std::invalid_argument("--variable must be deadline_T or cloud_F");
      spec.values = sweep_values;
      spec.n_instances = n_instances;
      spec.seed = common.seed;
      spec.schemes.clear();
      for (const std::string& name : scheme_names) {
        if (name == "proposed")
          spec.schemes.push_back(nomamec::Scheme::kProposed);
        else if (name == "equal")
          spec.schemes.push_back(nomamec::Scheme::kEqual);
        else if (name == "oma")
          spec.schemes.push_back(nomamec::Scheme::kOma);
        else
          throw std::invalid_argument("unknown scheme: " + name);
      }
      spec.scenario = resolve_scenario(common, users_override);
      spec.options = options;
      write_output(nomamec::run_sweep(spec).csv, common.out_path);
      return kExitOk;
    }
  } catch (const nomamec::InfeasibleError& e) {
    std::cerr << e.what() << "\n";
    return kExitInfeasible;
  } catch (const nomamec::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
