#pragma once

// Command implementations behind the multifluid executable. Each returns the
// process exit code: 0 pass, 1 invariant failure, 2 aborted run, 3 config
// or input error. Human-readable output goes to `out`; numbers carry 17
// significant digits.

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "multifluid/io/config.hpp"
#include "multifluid/stability.hpp"

namespace multifluid::io {

enum ExitCode : int { exit_pass = 0, exit_invariant_failure = 1, exit_aborted = 2, exit_config_error = 3 };

/// Worker cap from MULTIFLUID_THREADS (a positive integer); hardware
/// concurrency when unset. Throws ConfigError on an unparsable value.
int worker_limit();

/// Runs task(0..count-1) on at most worker_limit() threads. The first
/// exception thrown by a task is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

/// Eulerian run followed by a Lagrangian run of the transformed initial data
/// that replays the Eulerian step sizes.
std::pair<EulerTrajectory, LagrangeTrajectory> simulate_both(const Physics& physics, const EulerState& initial,
                                                             const TimeControl& control);

struct ConvergenceRow {
  int n_cells = 0;
  /// Against the manufactured solution, or against the next finer level.
  double density_error = 0.0;
  double velocity_error = 0.0;
  /// Orders from this level to the next; NaN on the last row that has an error.
  double density_order = 0.0;
  double velocity_order = 0.0;
  /// sup_t Euler-Lagrange distance at this level (self-convergence only).
  double cross_distance = 0.0;
  bool aborted = false;
};

struct ConvergenceReport {
  bool manufactured = false;
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log error against log h over all error rows.
  double density_order = 0.0;
  double velocity_order = 0.0;
  bool monotone = true;
  bool orders_met = true;
  bool cross_reduced = true;
  bool aborted = false;

  bool passed() const { return monotone && orders_met && cross_reduced && !aborted; }
  nlohmann::json to_json() const;
};

/// `levels` needs at least three entries in increasing order. Self-convergence
/// compares each level with the next finer one at the coarse nodes.
ConvergenceReport convergence_study(const RunConfig& config, const std::vector<int>& levels, bool manufactured);

struct StabilityReport {
  std::vector<StabilityGap> rows;
  /// max/min of gap/delta over the nonzero deltas.
  double spread = 0.0;
  bool stable = false;
  bool aborted = false;

  nlohmann::json to_json() const;
};

StabilityReport stability_study(const RunConfig& config, const std::vector<double>& deltas);

int cmd_simulate(const std::filesystem::path& config_path, std::optional<Coordinates> coords,
                 const std::filesystem::path& out_dir, std::ostream& out);
int cmd_verify(const std::filesystem::path& archive_dir, const std::filesystem::path& config_path, std::ostream& out);
int cmd_convergence(const std::filesystem::path& config_path, const std::vector<int>& levels, bool manufactured,
                    const std::optional<std::filesystem::path>& json_out, std::ostream& out);
int cmd_stability(const std::filesystem::path& config_path, const std::vector<double>& deltas,
                  const std::optional<std::filesystem::path>& json_out, std::ostream& out);

}  // namespace multifluid::io
