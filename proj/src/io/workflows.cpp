#include "multifluid/io/workflows.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "csv.hpp"
#include "multifluid/euler_solver.hpp"
#include "multifluid/io/archive.hpp"
#include "multifluid/lagrange_solver.hpp"
#include "multifluid/manufactured.hpp"

namespace multifluid::io {

using nlohmann::json;
namespace fs = std::filesystem;
using detail::format_number;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Slope of log(error) against log(1/n); NaN if fewer than two positive errors.
double fitted_order(const std::vector<int>& n, const std::vector<double>& e) {
  std::vector<std::pair<double, double>> points;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (e[k] > 0.0) points.emplace_back(-std::log(double(n[k])), std::log(e[k]));
  }
  if (points.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) mx += x, my += y;
  mx /= double(points.size());
  my /= double(points.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : points) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  return sxy / sxx;
}

double pair_order(int n0, double e0, int n1, double e1) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(e0 / e1) / std::log(double(n1) / double(n0));
}

/// L2 distance between a coarse state and a finer one sampled at the coarse nodes.
std::pair<double, double> restricted_distance(const EulerState& coarse, const EulerState& fine) {
  const Field x = coarse.grid.nodes();
  const Eigen::MatrixXd rho = interpolate_linear<double>(fine.grid.nodes(), fine.rho, x);
  const Eigen::MatrixXd u = interpolate_linear<double>(fine.grid.nodes(), fine.u, x);
  return {std::sqrt(integrate_columns(coarse.grid, (coarse.rho - rho).cwiseAbs2()).sum()),
          std::sqrt(integrate_columns(coarse.grid, (coarse.u - u).cwiseAbs2()).sum())};
}

json entry_json(const InvariantEntry& e) {
  return {{"name", e.name},
          {"passed", e.passed},
          {"exact", e.exact},
          {"max_violation", e.max_violation},
          {"tolerance", e.tolerance},
          {"detail", e.detail}};
}

json report_json(const InvariantReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) entries.push_back(entry_json(e));
  return {{"scope", report.scope}, {"all_passed", report.all_passed()}, {"entries", entries}};
}

void print_report(std::ostream& out, const std::string& title, const InvariantReport& report) {
  out << title << " (" << report.scope << ")\n";
  for (const auto& e : report.entries) {
    out << "  " << (e.passed ? "pass" : "FAIL") << (e.exact ? " exact " : "       ") << e.name
        << "  violation=" << format_number(e.max_violation) << "  tolerance=" << format_number(e.tolerance);
    if (!e.detail.empty()) out << "  (" << e.detail << ")";
    out << "\n";
  }
}

void write_json(const fs::path& path, const json& document) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  detail::write_file(path, document.dump(2) + "\n");
}

/// Runs `body`, mapping configuration and input errors to exit code 3.
template <typename Body>
int guarded_command(std::ostream& out, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << "\n";
  } catch (const ArchiveError& e) {
    out << "archive error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    out << "invalid input: " << e.what() << "\n";
  }
  return exit_config_error;
}

template <typename State>
InvariantReport verify_trajectory(const LoadedArchive& archive, const Trajectory<State>& trajectory,
                                  const RunConfig& config) {
  InvariantReport report = run_invariant_suite(trajectory, config.physics(), config.tolerances);

  InvariantEntry integrity{"archive_integrity", 0.0, 0.0, archive.checksum_ok, archive.checksum_ok,
                           "stored checksum " + archive.stored_checksum + ", computed " + archive.computed_checksum};
  integrity.max_violation = archive.checksum_ok ? 0.0 : 1.0;
  report.entries.insert(report.entries.begin(), integrity);

  const int expected = trajectory.steps / std::max(1, trajectory.snapshot_stride) + 1;
  const bool count_ok = int(trajectory.snapshots.size()) == expected;
  report.entries.push_back({"snapshot_count", count_ok ? 0.0 : 1.0, 0.0, count_ok, count_ok,
                            std::to_string(trajectory.snapshots.size()) + " snapshots, expected " +
                                std::to_string(expected)});
  if (trajectory.aborted) {
    report.entries.push_back({"run_completed", 1.0, 0.0, false, false, trajectory.abort_reason});
  }
  return report;
}

int verify_one(const fs::path& dir, const RunConfig& config, std::ostream& out) {
  const LoadedArchive archive = read_archive(dir);
  const InvariantReport report = std::visit(
      [&](const auto& trajectory) { return verify_trajectory(archive, trajectory, config); }, archive.trajectory);
  json document = report_json(report);
  document["archive"] = dir.string();
  document["coordinates"] = archive.is_lagrangian() ? "lagrange" : "euler";
  write_json(dir / "verification.json", document);
  print_report(out, dir.string() + (archive.is_lagrangian() ? " [lagrange]" : " [euler]"), report);
  return report.all_passed() ? exit_pass : exit_invariant_failure;
}

}  // namespace

int worker_limit() {
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("MULTIFLUID_THREADS");
  if (!env || !*env) return int(hardware);
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 4096) {
    throw ConfigError("MULTIFLUID_THREADS", std::string("expected a positive integer, got '") + env + "'");
  }
  return int(value);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(count, std::size_t(worker_limit()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          task(k);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::pair<EulerTrajectory, LagrangeTrajectory> simulate_both(const Physics& physics, const EulerState& initial,
                                                             const TimeControl& control) {
  EulerTrajectory euler = simulate(physics, initial, control);
  TimeControl replay = control;
  replay.dt_schedule = euler.step_sizes();
  LagrangeTrajectory lagrange = simulate_lagrange(physics, to_lagrangian(initial), replay);
  return {std::move(euler), std::move(lagrange)};
}

json ConvergenceReport::to_json() const {
  json table = json::array();
  for (const auto& r : rows) {
    json row = {{"n_cells", r.n_cells},
                {"density_error", r.density_error},
                {"velocity_error", r.velocity_error},
                {"aborted", r.aborted}};
    if (std::isfinite(r.density_order)) row["density_order"] = r.density_order;
    if (std::isfinite(r.velocity_order)) row["velocity_order"] = r.velocity_order;
    if (!manufactured) row["cross_distance"] = r.cross_distance;
    table.push_back(row);
  }
  json out = {{"mode", manufactured ? "manufactured" : "self"},
              {"rows", table},
              {"monotone", monotone},
              {"orders_met", orders_met},
              {"cross_reduced", cross_reduced},
              {"aborted", aborted},
              {"passed", passed()}};
  if (std::isfinite(density_order)) out["density_order"] = density_order;
  if (std::isfinite(velocity_order)) out["velocity_order"] = velocity_order;
  return out;
}

ConvergenceReport convergence_study(const RunConfig& config, const std::vector<int>& levels, bool manufactured) {
  if (levels.size() < 3) throw ConfigError("levels", "at least three levels are needed");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] < 8) throw ConfigError("levels", "every level needs at least 8 cells");
    if (k > 0 && levels[k] <= levels[k - 1]) throw ConfigError("levels", "levels must increase");
  }
  if (manufactured && !config.mms) throw ConfigError("mms", "--mms needs an mms block in the config");

  const Physics physics = config.physics();
  ConvergenceReport report;
  report.manufactured = manufactured;
  report.rows.resize(levels.size());
  const std::size_t m = levels.size();

  if (manufactured) {
    const ManufacturedSolution solution(physics, *config.mms);
    parallel_for(m, [&](std::size_t k) {
      const int n = levels[k];
      const TimeControl control = config.time_control(n);
      const ManufacturedError e = manufactured_error(solution, n, control.final_time, control.cfl, control.dt_max * n);
      report.rows[k] = {n, e.density, e.velocity, 0.0, 0.0, 0.0, e.aborted};
    });
  } else {
    std::vector<std::optional<std::pair<EulerTrajectory, LagrangeTrajectory>>> runs(m);
    parallel_for(m, [&](std::size_t k) {
      const int n = levels[k];
      runs[k] = simulate_both(physics, config.initial_state(n), config.time_control(n));
    });
    for (std::size_t k = 0; k < m; ++k) {
      auto& [euler, lagrange] = *runs[k];
      ConvergenceRow& row = report.rows[k];
      row.n_cells = levels[k];
      row.aborted = euler.aborted || lagrange.aborted;
      row.cross_distance = row.aborted ? std::numeric_limits<double>::quiet_NaN()
                                       : cross_coordinate_distance(euler, lagrange,
                                                                   config.tolerances.volume_consistency)
                                             .sup;
      if (k + 1 < m) {
        const auto [drho, du] = restricted_distance(euler.final_state, runs[k + 1]->first.final_state);
        row.density_error = drho;
        row.velocity_error = du;
      } else {
        row.density_error = row.velocity_error = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }

  // Error rows: all levels for a manufactured solution, all but the finest otherwise.
  const std::size_t with_error = manufactured ? m : m - 1;
  std::vector<int> n;
  std::vector<double> rho_e, u_e;
  for (std::size_t k = 0; k < m; ++k) {
    ConvergenceRow& row = report.rows[k];
    report.aborted = report.aborted || row.aborted;
    row.density_order = row.velocity_order = std::numeric_limits<double>::quiet_NaN();
    if (k + 1 < with_error) {
      const ConvergenceRow& next = report.rows[k + 1];
      row.density_order = pair_order(row.n_cells, row.density_error, next.n_cells, next.density_error);
      row.velocity_order = pair_order(row.n_cells, row.velocity_error, next.n_cells, next.velocity_error);
      // Errors already at rounding level cannot decay further.
      const double floor = 1e-13;
      if (!(next.density_error < row.density_error || row.density_error < floor)) report.monotone = false;
      if (!(next.velocity_error < row.velocity_error || row.velocity_error < floor)) report.monotone = false;
    }
    if (k < with_error) {
      n.push_back(row.n_cells);
      rho_e.push_back(row.density_error);
      u_e.push_back(row.velocity_error);
    }
    if (!manufactured && k + 1 < m) {
      const double ratio = double(report.rows[k + 1].n_cells) / row.n_cells;
      const double needed = std::pow(config.thresholds.cross_reduction, std::log2(ratio));
      if (!(report.rows[k + 1].cross_distance * needed <= row.cross_distance)) report.cross_reduced = false;
    }
  }
  report.density_order = fitted_order(n, rho_e);
  report.velocity_order = fitted_order(n, u_e);

  const bool at_roundoff = *std::max_element(rho_e.begin(), rho_e.end()) < 1e-12 &&
                           *std::max_element(u_e.begin(), u_e.end()) < 1e-12;
  if (!at_roundoff) {
    report.orders_met = report.density_order >= config.thresholds.density_order &&
                        report.velocity_order >= config.thresholds.velocity_order;
  }
  return report;
}

json StabilityReport::to_json() const {
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back({{"delta", r.delta}, {"gap", r.gap}, {"ratio", r.ratio}, {"aborted", r.aborted}});
  }
  return {{"rows", table}, {"spread", spread}, {"stable", stable}, {"aborted", aborted}};
}

StabilityReport stability_study(const RunConfig& config, const std::vector<double>& deltas) {
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] >= 0.0) || !std::isfinite(deltas[k])) throw ConfigError("deltas", "must be finite and nonnegative");
  }
  const Physics physics = config.physics();
  const TimeControl control = config.time_control();
  const EulerTrajectory base = simulate(physics, config.initial_state(), control);

  StabilityReport report;
  report.rows.resize(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t k) { report.rows[k] = stability_gap(physics, base, control, deltas[k]); });

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& r : report.rows) {
    report.aborted = report.aborted || r.aborted;
    if (r.delta > 0.0) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
  }
  report.spread = hi > 0.0 && lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  report.stable = !report.aborted && report.spread <= config.thresholds.stability_spread;
  return report;
}

int cmd_simulate(const fs::path& config_path, std::optional<Coordinates> coords, const fs::path& out_dir,
                 std::ostream& out) {
  return guarded_command(out, [&] {
    RunConfig config = load_config(config_path);
    if (coords) config.coords = *coords;
    const Physics physics = config.physics();
    const EulerState initial = config.initial_state();
    const TimeControl control = config.time_control();
    bool aborted = false;
    bool inconsistent = false;

    auto report_run = [&](const char* name, const auto& trajectory, const fs::path& dir, double seconds) {
      out << name << ": " << trajectory.steps << " steps to t=" << format_number(trajectory.final_state.time) << ", "
          << trajectory.snapshots.size() << " snapshots in " << dir.string() << " (" << format_number(seconds)
          << " s)\n";
      if (trajectory.aborted) out << name << ": run aborted: " << trajectory.abort_reason << "\n";
      aborted = aborted || trajectory.aborted;
    };

    if (config.coords == Coordinates::euler) {
      const auto start = std::chrono::steady_clock::now();
      const EulerTrajectory run = simulate(physics, initial, control);
      const double seconds = seconds_since(start);
      write_archive(out_dir, run, config, {seconds});
      report_run("euler", run, out_dir, seconds);
    } else if (config.coords == Coordinates::lagrange) {
      const auto start = std::chrono::steady_clock::now();
      const LagrangeTrajectory run = simulate_lagrange(physics, to_lagrangian(initial), control);
      const double seconds = seconds_since(start);
      write_archive(out_dir, run, config, {seconds});
      report_run("lagrange", run, out_dir, seconds);
    } else {
      auto start = std::chrono::steady_clock::now();
      const EulerTrajectory euler = simulate(physics, initial, control);
      const double euler_seconds = seconds_since(start);
      TimeControl replay = control;
      replay.dt_schedule = euler.step_sizes();
      start = std::chrono::steady_clock::now();
      const LagrangeTrajectory lagrange = simulate_lagrange(physics, to_lagrangian(initial), replay);
      const double lagrange_seconds = seconds_since(start);

      write_archive(out_dir / "euler", euler, config, {euler_seconds});
      write_archive(out_dir / "lagrange", lagrange, config, {lagrange_seconds});
      report_run("euler", euler, out_dir / "euler", euler_seconds);
      report_run("lagrange", lagrange, out_dir / "lagrange", lagrange_seconds);

      json comparison = {{"n_cells", config.n_cells}, {"euler_aborted", euler.aborted},
                         {"lagrange_aborted", lagrange.aborted}};
      if (!euler.aborted && !lagrange.aborted) {
        try {
          const CrossDistance d = cross_coordinate_distance(euler, lagrange, config.tolerances.volume_consistency);
          comparison["sup_distance"] = d.sup;
          comparison["times"] = d.times;
          comparison["distance"] = d.distance;
          out << "sup_t L2 distance between coordinate systems: " << format_number(d.sup) << "\n";
        } catch (const MassConsistencyError& e) {
          comparison["error"] = e.what();
          out << "no comparison: " << e.what() << "\n";
          inconsistent = true;
        }
      }
      write_json(out_dir / "comparison.json", comparison);
    }
    if (aborted) return int(exit_aborted);
    return inconsistent ? int(exit_invariant_failure) : int(exit_pass);
  });
}

int cmd_verify(const fs::path& archive_dir, const fs::path& config_path, std::ostream& out) {
  return guarded_command(out, [&] {
    const RunConfig config = load_config(config_path);
    if (!fs::exists(archive_dir / "manifest.json") && fs::is_directory(archive_dir / "euler") &&
        fs::is_directory(archive_dir / "lagrange")) {
      const int a = verify_one(archive_dir / "euler", config, out);
      const int b = verify_one(archive_dir / "lagrange", config, out);
      return std::max(a, b);
    }
    return verify_one(archive_dir, config, out);
  });
}

int cmd_convergence(const fs::path& config_path, const std::vector<int>& levels, bool manufactured,
                    const std::optional<fs::path>& json_out, std::ostream& out) {
  return guarded_command(out, [&] {
    const RunConfig config = load_config(config_path);
    const ConvergenceReport report = convergence_study(config, levels, manufactured);
    out << (manufactured ? "manufactured solution" : "self-convergence") << "\n";
    out << "n_cells,density_error,velocity_error,density_order,velocity_order" << (manufactured ? "" : ",cross_distance")
        << "\n";
    for (const auto& r : report.rows) {
      out << r.n_cells << ',' << format_number(r.density_error) << ',' << format_number(r.velocity_error) << ','
          << format_number(r.density_order) << ',' << format_number(r.velocity_order);
      if (!manufactured) out << ',' << format_number(r.cross_distance);
      out << "\n";
    }
    out << "fitted order: density " << format_number(report.density_order) << ", velocity "
        << format_number(report.velocity_order) << "\n";
    if (!report.monotone) out << "warning: error decay is not monotone\n";
    if (!report.orders_met) out << "orders below threshold\n";
    if (!report.cross_reduced) out << "Euler-Lagrange distance did not shrink enough under refinement\n";
    out << (report.passed() ? "PASS" : "FAIL") << "\n";
    if (json_out) write_json(*json_out, report.to_json());
    if (report.aborted) return int(exit_aborted);
    return report.passed() ? int(exit_pass) : int(exit_invariant_failure);
  });
}

int cmd_stability(const fs::path& config_path, const std::vector<double>& deltas,
                  const std::optional<fs::path>& json_out, std::ostream& out) {
  return guarded_command(out, [&] {
    const RunConfig config = load_config(config_path);
    const StabilityReport report = stability_study(config, deltas);
    out << "delta,gap,ratio\n";
    for (const auto& r : report.rows) {
      out << format_number(r.delta) << ',' << format_number(r.gap) << ',' << format_number(r.ratio) << "\n";
    }
    out << "spread " << format_number(report.spread) << ": " << (report.stable ? "stable" : "not stable") << "\n";
    if (json_out) write_json(*json_out, report.to_json());
    if (report.aborted) return int(exit_aborted);
    return report.stable ? int(exit_pass) : int(exit_invariant_failure);
  });
}

}  // namespace multifluid::io
