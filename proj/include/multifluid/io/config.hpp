#pragma once

// Run configuration: a JSON document with a fixed key set. Unknown keys are
// rejected with their path, and every physical hypothesis is re-checked at
// load time.
//
// Keys (defaults in brackets):
//   n_components        [inferred from viscosity]
//   pressure_const      K > 0
//   polytropic_index    gamma > 1
//   viscosity           symmetric positive-definite N x N array
//   n_cells             >= 8
//   final_time          [1]
//   cfl                 [0.5], in (0, 1]
//   dt_max | dt_max_per_h   absolute cap, or cap per unit cell width [0.5]
//   dt_min              [1e-10 * final_time]
//   snapshot_stride     [10]
//   coords              "euler" | "lagrange" | "both" ["euler"]
//   initial_data        {"density": [profile...], "velocity": [profile...]}
//                       or {"csv": path} with columns x, rho_1..rho_N, u_1..u_N
//   tolerances          any field of Tolerances, plus the convergence and
//                       stability thresholds below
//   mms                 manufactured-solution parameters (convergence --mms)
//
// A profile is {"profile": "uniform", "value": c},
// {"profile": "sine", "offset": a, "amplitude": b, "mode": m, "phase": p}
// meaning a + b sin(m pi x + p), or
// {"profile": "bump", "offset": a, "amplitude": b, "center": c, "width": w}
// meaning a + b exp(-((x - c)/w)^2).

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "multifluid/diagnostics.hpp"
#include "multifluid/manufactured.hpp"
#include "multifluid/state.hpp"

namespace multifluid::io {

enum class Coordinates { euler, lagrange, both };

std::string to_string(Coordinates c);
/// Throws ConfigError for anything but "euler", "lagrange" or "both".
Coordinates parse_coordinates(const std::string& text, const std::string& path = "coords");

struct ProfileSpec {
  std::string kind = "uniform";
  double value = 0.0;
  double offset = 0.0;
  double amplitude = 0.0;
  double mode = 1.0;
  double phase = 0.0;
  double center = 0.5;
  double width = 0.1;

  double operator()(double x) const;
};

struct InitialDataSpec {
  std::vector<ProfileSpec> density;
  std::vector<ProfileSpec> velocity;
  /// Absolute path of a CSV with node samples; empty when profiles are used.
  std::filesystem::path csv;
};

/// Pass marks of the convergence and stability studies.
struct StudyThresholds {
  double velocity_order = 1.0;
  double density_order = 0.8;
  /// Largest allowed max/min spread of gap/delta across perturbation sizes.
  double stability_spread = 10.0;
  /// Required reduction of the Euler-Lagrange distance per doubling.
  double cross_reduction = 2.0;
};

struct RunConfig {
  FluidParams params{2, 1.0, 1.4};
  Eigen::MatrixXd viscosity;
  int n_cells = 64;
  double final_time = 1.0;
  double cfl = 0.5;
  std::optional<double> dt_max;
  double dt_max_per_h = 0.5;
  double dt_min = 0.0;
  int snapshot_stride = 10;
  Coordinates coords = Coordinates::euler;
  InitialDataSpec initial;
  Tolerances tolerances;
  StudyThresholds thresholds;
  std::optional<ManufacturedParams> mms;

  Physics physics() const;
  /// Time control for a grid of `n_cells` cells (the dt cap may scale with h).
  TimeControl time_control(int n_cells) const;
  TimeControl time_control() const { return time_control(n_cells); }
  /// Samples the initial data on the unit interval with `n_cells` cells and
  /// checks it. Throws ConfigError listing every violated hypothesis.
  EulerState initial_state(int n_cells) const;
  EulerState initial_state() const { return initial_state(n_cells); }
};

/// Normalized document: every key with its effective value. Loading it again
/// reproduces the configuration exactly.
nlohmann::json to_json(const RunConfig& config);

/// `base_dir` resolves relative CSV paths.
RunConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});

/// Throws ConfigError on a missing file, malformed JSON or invalid content.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace multifluid::io
