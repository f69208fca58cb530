#include "nomamec/experiments.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "nomamec/baselines.hpp"
#include "nomamec/json_io.hpp"
#include "nomamec/util.hpp"

namespace nomamec {

std::string to_string(SweepVariable variable) {
  return variable == SweepVariable::kDeadlineT ? "deadline_T" : "cloud_F";
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProposed: return "proposed";
    case Scheme::kEqual: return "equal";
    case Scheme::kOma: return "oma";
  }
  return "?";
}

std::string run_convergence(const ConvergeConfig& config) {
  check_spec(config.scenario);
  if (config.cloud_capacities.empty())
    throw std::invalid_argument("run_convergence: need at least one capacity value");

  // One network shared across capacities: resample until the tightest
  // capacity admits it, so the traces stay paired.
  const double tightest =
      *std::min_element(config.cloud_capacities.begin(), config.cloud_capacities.end());
  ScenarioSpec probe = config.scenario;
  probe.cloud_capacity_cycles = tightest;
  ProblemInstance base;
  try {
    base = generate(probe);
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "run_convergence: seed " << config.scenario.seed << ": " << e.what();
    throw std::runtime_error(msg.str());
  }

  std::ostringstream out;
  out << "F,iteration,objective_joules\n";
  for (double capacity : config.cloud_capacities) {
    ProblemInstance instance = base;
    instance.cloud_capacity_cycles = capacity;
    SolveResult result;
    try {
      result = solve(instance, config.options);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "run_convergence: seed " << config.scenario.seed << ", F=" << capacity << ": "
          << e.what();
      throw std::runtime_error(msg.str());
    }
    for (std::size_t it = 0; it < result.trace.objective_j.size(); ++it)
      out << format_sci(capacity) << ',' << it << ','
          << format_sci(result.trace.objective_j[it]) << '\n';
  }
  return out.str();
}

namespace {

void check_sweep(const SweepSpec& spec) {
  check_spec(spec.scenario);
  if (spec.values.empty()) throw std::invalid_argument("sweep: empty value list");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1]))
      throw std::invalid_argument("sweep: values must be strictly increasing");
  if (spec.n_instances < 1) throw std::invalid_argument("sweep: n_instances must be >= 1");
  if (spec.schemes.empty()) throw std::invalid_argument("sweep: no schemes selected");
}

ProblemInstance at_value(const SweepSpec& spec, const ProblemInstance& base, std::uint64_t seed,
                         std::uint64_t attempt, double value) {
  if (spec.variable == SweepVariable::kCloudF) {
    ProblemInstance instance = base;
    instance.cloud_capacity_cycles = value;
    return instance;
  }
  // The deadline reshapes the mandatory-offload floors, so the instance is
  // redrawn from the same user stream with the new deadline.
  ScenarioSpec scenario = spec.scenario;
  scenario.seed = seed;
  scenario.deadline_s = value;
  return generate_raw(scenario, attempt);
}

}  // namespace

SweepOutput run_sweep(const SweepSpec& spec) {
  check_sweep(spec);

  // Per requested instance index, find deterministically the first draw
  // that is feasible at every swept value (paired-seed discipline).
  struct Task {
    std::uint64_t seed;
    std::uint64_t attempt;
  };
  std::vector<Task> tasks;
  for (int rep = 0; rep < spec.n_instances; ++rep) {
    const std::uint64_t seed = rng::mix(spec.seed, static_cast<std::uint64_t>(rep));
    ScenarioSpec scenario = spec.scenario;
    scenario.seed = seed;
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < 100000 && !found; ++attempt) {
      bool all_ok = true;
      for (double value : spec.values) {
        ScenarioSpec probe = scenario;
        if (spec.variable == SweepVariable::kCloudF)
          probe.cloud_capacity_cycles = value;
        else
          probe.deadline_s = value;
        if (!validate_instance(generate_raw(probe, attempt)).ok()) {
          all_ok = false;
          break;
        }
      }
      if (all_ok) {
        tasks.push_back({seed, attempt});
        found = true;
      }
    }
    if (!found) {
      std::ostringstream msg;
      msg << "sweep: no draw feasible across all values for instance " << rep << " (seed "
          << seed << ")";
      throw std::runtime_error(msg.str());
    }
  }

  const std::size_t n_cells = spec.values.size() * spec.schemes.size();
  std::vector<std::vector<double>> energies(n_cells,
                                            std::vector<double>(tasks.size(), 0.0));

  struct Job {
    std::size_t value_idx;
    std::size_t scheme_idx;
    std::size_t task_idx;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < spec.values.size(); ++v)
    for (std::size_t s = 0; s < spec.schemes.size(); ++s)
      for (std::size_t k = 0; k < tasks.size(); ++k) jobs.push_back({v, s, k});

  // Paired discipline: all schemes at one sweep point must consume the same
  // instance bytes; assert via content hash.
  std::vector<std::vector<std::uint64_t>> hashes(
      spec.values.size(), std::vector<std::uint64_t>(tasks.size(), 0));
  for (std::size_t v = 0; v < spec.values.size(); ++v) {
    ScenarioSpec scenario = spec.scenario;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      scenario.seed = tasks[k].seed;
      ProblemInstance base = generate_raw(scenario, tasks[k].attempt);
      const ProblemInstance instance =
          at_value(spec, base, tasks[k].seed, tasks[k].attempt, spec.values[v]);
      hashes[v][k] = fnv1a(instance_to_json(instance));
    }
  }

  parallel_for(jobs.size(), [&](std::size_t idx) {
    const Job& job = jobs[idx];
    ScenarioSpec scenario = spec.scenario;
    scenario.seed = tasks[job.task_idx].seed;
    const ProblemInstance base = generate_raw(scenario, tasks[job.task_idx].attempt);
    const ProblemInstance instance = at_value(spec, base, tasks[job.task_idx].seed,
                                              tasks[job.task_idx].attempt, spec.values[job.value_idx]);
    // paired discipline: every scheme must consume the exact same bytes
    if (fnv1a(instance_to_json(instance)) != hashes[job.value_idx][job.task_idx])
      throw std::runtime_error("sweep: paired instance hash mismatch");

    double energy = 0.0;
    try {
      switch (spec.schemes[job.scheme_idx]) {
        case Scheme::kProposed: energy = solve(instance, spec.options).report.total_j; break;
        case Scheme::kEqual: energy = equal_resource_solve(instance).report.total_j; break;
        case Scheme::kOma: energy = oma_solve(instance, spec.options).report.total_j; break;
      }
    } catch (const InfeasibleError& e) {
      std::ostringstream msg;
      msg << "sweep: seed " << tasks[job.task_idx].seed << ": " << e.what();
      throw InfeasibleError(msg.str());
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "sweep: seed " << tasks[job.task_idx].seed << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
    energies[job.value_idx * spec.schemes.size() + job.scheme_idx][job.task_idx] = energy;
  });

  SweepOutput output;
  std::ostringstream csv;
  csv << "variable,value,scheme,mean_energy_j,n\n";
  for (std::size_t v = 0; v < spec.values.size(); ++v) {
    for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
      const auto& cell = energies[v * spec.schemes.size() + s];
      double sum = 0.0;
      for (double e : cell) sum += e;
      SweepRow row{spec.variable, spec.values[v], spec.schemes[s],
                   sum / static_cast<double>(cell.size()), static_cast<int>(cell.size())};
      output.rows.push_back(row);
      csv << to_string(row.variable) << ',' << format_sci(row.value) << ','
          << to_string(row.scheme) << ',' << format_sci(row.mean_energy_j) << ',' << row.n
          << '\n';
    }
  }
  output.csv = csv.str();
  return output;
}

}  // namespace nomamec
