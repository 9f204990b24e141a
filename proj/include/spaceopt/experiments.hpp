#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spaceopt/io.hpp"
#include "spaceopt/rng.hpp"

namespace spaceopt::bench {

/// Desk-scale experiment drivers. Each experiment is described by a JSON
/// spec (objective, budgets, split, generation rates, score settings,
/// repeats); built-in specs are available by name and shipped under
/// data/experiments/ for customization. Outputs are CSV curves plus a
/// manifest, written into an output directory.
std::vector<std::string> experiment_names();
Json default_experiment_spec(const std::string& name);

struct ExperimentOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  std::optional<int> n_x_batches;
  std::optional<int> n_posterior_samples;
  int n_threads = 0;
};

/// Runs the spec and writes its artifacts under out_dir (created if needed).
/// Returns the list of files written (relative to out_dir).
std::vector<std::string> run_experiment(const Json& spec,
                                        const std::filesystem::path& out_dir,
                                        const ExperimentOverrides& overrides = {});

}  // namespace spaceopt::bench
