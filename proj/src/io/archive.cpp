#include "multifluid/io/archive.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <vector>

#include "csv.hpp"

namespace multifluid::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string snapshot_name(std::size_t k) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "snapshot_%05zu.csv", k);
  return buffer;
}

std::string hex(std::uint64_t value) {
  char buffer[20];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

std::vector<std::string> field_columns(const char* coordinate, int n, bool lagrangian) {
  std::vector<std::string> columns{coordinate};
  for (int i = 1; i <= n; ++i) columns.push_back("rho_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) columns.push_back("u_" + std::to_string(i));
  if (lagrangian) {
    columns.push_back("rho");
    for (int i = 1; i <= n; ++i) columns.push_back("c_" + std::to_string(i));
  }
  return columns;
}

detail::Table state_table(const EulerState& s) {
  const Eigen::Index n = s.n_components();
  detail::Table t{field_columns("x", int(n), false), Eigen::MatrixXd(s.grid.n_nodes(), 1 + 2 * n)};
  t.values << s.grid.nodes(), s.rho, s.u;
  return t;
}

detail::Table state_table(const LagrangeState& s) {
  const Eigen::Index n = s.n_components();
  detail::Table t{field_columns("y", int(n), true), Eigen::MatrixXd(s.grid.n_nodes(), 2 + 3 * n)};
  t.values << s.grid.nodes(), s.component_densities(), s.u, s.rho, s.concentration;
  return t;
}

detail::Table diagnostics_table(const std::vector<StepRecord>& records, int n) {
  std::vector<std::string> columns{"t", "E", "dissipation"};
  for (int i = 1; i <= n; ++i) columns.push_back("mass_" + std::to_string(i));
  for (const char* c : {"min_rho", "max_rho", "lograd_norm", "beta"}) columns.push_back(c);
  detail::Table t{columns, Eigen::MatrixXd(Eigen::Index(records.size()), Eigen::Index(columns.size()))};
  for (std::size_t k = 0; k < records.size(); ++k) {
    const StepRecord& r = records[k];
    auto row = t.values.row(Eigen::Index(k));
    row(0) = r.time;
    row(1) = r.energy;
    row(2) = r.dissipation_rate;
    row.segment(3, n) = r.component_mass;
    row(3 + n) = r.min_rho;
    row(4 + n) = r.max_rho;
    row(5 + n) = r.lograd_norm;
    row(6 + n) = r.beta;
  }
  return t;
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buffer;
}

template <typename State>
void write_any(const fs::path& dir, const Trajectory<State>& trajectory, const RunConfig& config,
               const ArchiveTimings& timings, const char* coordinates) {
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("snapshot_", 0) == 0 && entry.path().extension() == ".csv") fs::remove(entry.path());
  }

  std::uint64_t checksum = fnv1a("");
  auto emit = [&](const std::string& name, const std::string& content) {
    detail::write_file(dir / name, content);
    checksum = fnv1a(content, checksum);
  };
  for (std::size_t k = 0; k < trajectory.snapshots.size(); ++k) {
    emit(snapshot_name(k), detail::to_csv(state_table(trajectory.snapshots[k])));
  }
  emit("final.csv", detail::to_csv(state_table(trajectory.final_state)));
  const int n = trajectory.final_state.n_components();
  emit("diagnostics.csv", detail::to_csv(diagnostics_table(trajectory.records, n)));

  json times = json::array();
  for (const auto& s : trajectory.snapshots) times.push_back(s.time);
  const json manifest = {
      {"format_version", archive_format_version},
      {"coordinates", coordinates},
      {"config", to_json(config)},
      {"n_cells", trajectory.final_state.grid.n_cells()},
      {"length", trajectory.final_state.grid.length()},
      {"n_components", n},
      {"steps", trajectory.steps},
      {"snapshot_stride", trajectory.snapshot_stride},
      {"snapshot_count", trajectory.snapshots.size()},
      {"snapshot_times", times},
      {"final_time", trajectory.final_state.time},
      {"aborted", trajectory.aborted},
      {"abort_reason", trajectory.abort_reason},
      {"checksum", hex(checksum)},
      {"timings", {{"wall_seconds", timings.wall_seconds}, {"written_at", iso_timestamp()}}},
  };
  detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

detail::Table load_table(const fs::path& path, const std::vector<std::string>& expected, std::uint64_t& checksum) {
  std::string text;
  try {
    text = detail::read_file(path);
  } catch (const std::exception& e) {
    throw ArchiveError(e.what());
  }
  checksum = fnv1a(text, checksum);
  detail::Table t;
  try {
    t = detail::parse_csv(text, path.string());
  } catch (const std::exception& e) {
    throw ArchiveError(e.what());
  }
  if (t.columns != expected) throw ArchiveError(path.string() + ": unexpected columns");
  return t;
}

EulerState euler_from(const detail::Table& t, int n, double time, const Grid& grid) {
  if (t.values.rows() != grid.n_nodes()) throw ArchiveError("snapshot has the wrong number of rows");
  return EulerState{time, grid, t.values.middleCols(1, n), t.values.middleCols(1 + n, n)};
}

LagrangeState lagrange_from(const detail::Table& t, int n, double time, const Grid& grid) {
  if (t.values.rows() != grid.n_nodes()) throw ArchiveError("snapshot has the wrong number of rows");
  return LagrangeState{time, grid, t.values.col(1 + 2 * n), t.values.middleCols(2 + 2 * n, n),
                       t.values.middleCols(1 + n, n)};
}

template <typename State, typename Build>
Trajectory<State> read_any(const fs::path& dir, const json& manifest, const char* coordinate, bool lagrangian,
                           Build build, std::uint64_t& checksum) {
  const int n = manifest.at("n_components").get<int>();
  const Grid grid(manifest.at("n_cells").get<int>(), manifest.at("length").get<double>());
  const auto columns = field_columns(coordinate, n, lagrangian);
  const auto times = manifest.at("snapshot_times").get<std::vector<double>>();
  const std::size_t count = manifest.at("snapshot_count").get<std::size_t>();
  if (times.size() != count) throw ArchiveError("manifest: snapshot_times does not match snapshot_count");

  std::vector<State> snapshots;
  for (std::size_t k = 0; k < count; ++k) {
    snapshots.push_back(build(load_table(dir / snapshot_name(k), columns, checksum), n, times[k], grid));
  }
  State final_state = build(load_table(dir / "final.csv", columns, checksum), n,
                            manifest.at("final_time").get<double>(), grid);

  std::vector<std::string> diag_columns{"t", "E", "dissipation"};
  for (int i = 1; i <= n; ++i) diag_columns.push_back("mass_" + std::to_string(i));
  for (const char* c : {"min_rho", "max_rho", "lograd_norm", "beta"}) diag_columns.push_back(c);
  const detail::Table diag = load_table(dir / "diagnostics.csv", diag_columns, checksum);

  Trajectory<State> trajectory(std::move(final_state));
  trajectory.snapshots = std::move(snapshots);
  trajectory.steps = manifest.at("steps").get<int>();
  trajectory.snapshot_stride = manifest.at("snapshot_stride").get<int>();
  trajectory.aborted = manifest.at("aborted").get<bool>();
  trajectory.abort_reason = manifest.at("abort_reason").get<std::string>();
  for (Eigen::Index k = 0; k < diag.values.rows(); ++k) {
    const auto row = diag.values.row(k);
    StepRecord r;
    r.time = row(0);
    r.dt = k == 0 ? 0.0 : row(0) - diag.values(k - 1, 0);
    r.energy = row(1);
    r.dissipation_rate = row(2);
    r.component_mass = row.segment(3, n);
    r.min_rho = row(3 + n);
    r.max_rho = row(4 + n);
    r.lograd_norm = row(5 + n);
    r.beta = row(6 + n);
    trajectory.records.push_back(r);
  }
  return trajectory;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_archive(const fs::path& dir, const EulerTrajectory& trajectory, const RunConfig& config,
                   const ArchiveTimings& timings) {
  write_any(dir, trajectory, config, timings, "euler");
}

void write_archive(const fs::path& dir, const LagrangeTrajectory& trajectory, const RunConfig& config,
                   const ArchiveTimings& timings) {
  write_any(dir, trajectory, config, timings, "lagrange");
}

LoadedArchive read_archive(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ArchiveError("archive not found: " + dir.string());
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw ArchiveError("archive has no manifest.json: " + dir.string());

  json manifest;
  try {
    manifest = json::parse(detail::read_file(manifest_path));
  } catch (const std::exception& e) {
    throw ArchiveError(std::string("manifest.json: ") + e.what());
  }
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != archive_format_version) {
      throw ArchiveError("archive format version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(archive_format_version) + ")");
    }
    std::uint64_t checksum = fnv1a("");
    const std::string coordinates = manifest.at("coordinates").get<std::string>();
    auto load = [&]() -> std::variant<EulerTrajectory, LagrangeTrajectory> {
      if (coordinates == "euler") return read_any<EulerState>(dir, manifest, "x", false, euler_from, checksum);
      if (coordinates == "lagrange") return read_any<LagrangeState>(dir, manifest, "y", true, lagrange_from, checksum);
      throw ArchiveError("manifest: unknown coordinates '" + coordinates + "'");
    };
    LoadedArchive out{manifest, load(), false, manifest.at("checksum").get<std::string>(), ""};
    out.computed_checksum = hex(checksum);
    out.checksum_ok = out.stored_checksum == out.computed_checksum;
    return out;
  } catch (const json::exception& e) {
    throw ArchiveError(std::string("manifest.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ArchiveError(std::string("archive: ") + e.what());
  }
}

}  // namespace multifluid::io
