#pragma once

// Run configuration as a single JSON document. Every object rejects keys it
// does not know; see docs/config.md for the schema.

#include <cstdint>
#include <string>
#include <vector>

#include "lifespan/experiments.hpp"
#include "lifespan/profile.hpp"

namespace lifespan {

struct PropsSettings {
  std::size_t lemma_pairs = 100000;
  /// Scales the admissible constants of the pointwise-lemma suite; values
  /// below 1 exist only to show that the harness can fail.
  double lemma_scale = 1.0;
};

struct RunConfig {
  ModelParams model;
  SolverKnobs solver;
  /// Used by `simulate`: end time, record times and an optional fixed grid.
  double t_end = 1.0;
  std::vector<double> record_times;
  std::vector<double> sweep_eps{0.5, 0.4, 0.3, 0.25, 0.2};
  std::vector<double> residual_eps{0.08, 0.06, 0.04, 0.03, 0.02};
  BudgetOptions budget;
  ApproxOptions approx;
  PropsSettings props;
  std::string output_dir = "out";
  std::uint64_t seed = 20240611;
  std::size_t threads = 0;
};

/// Parses and validates; throws InvalidArgument naming the offending key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
/// Serialises every field (round-trips through parse_run_config).
std::string dump_run_config(const RunConfig& config);

}  // namespace lifespan
