#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "multifluid/io/archive.hpp"
#include "multifluid/io/config.hpp"
#include "multifluid/io/workflows.hpp"
#include "multifluid/lagrange_solver.hpp"

namespace fs = std::filesystem;
namespace mf = multifluid;
namespace io = multifluid::io;
using nlohmann::json;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("multifluid_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

json uniform_profile(double value) { return {{"profile", "uniform"}, {"value", value}}; }

json equilibrium_document() {
  return {{"pressure_const", 1.0},
          {"polytropic_index", 1.4},
          {"viscosity", {{2.0, 1.0}, {1.0, 2.0}}},
          {"n_cells", 32},
          {"final_time", 0.5},
          {"snapshot_stride", 5},
          {"initial_data",
           {{"density", {uniform_profile(0.3), uniform_profile(0.7)}},
            {"velocity", {uniform_profile(0.0), uniform_profile(0.0)}}}}};
}

json wave_document() {
  json doc = equilibrium_document();
  doc["final_time"] = 0.1;
  doc["snapshot_stride"] = 1;
  doc["initial_data"]["density"][0] = {{"profile", "sine"}, {"offset", 0.5}, {"amplitude", 0.1}, {"mode", 2}};
  doc["initial_data"]["velocity"][0] = {{"profile", "sine"}, {"offset", 0.0}, {"amplitude", 0.2}, {"mode", 1}};
  return doc;
}

// Opposite narrow velocity bumps drain the middle node through both faces
// faster than a step above dt_min allows.
json aborting_document() {
  json doc = equilibrium_document();
  doc["final_time"] = 0.1;
  doc["cfl"] = 1.0;
  doc["dt_max"] = 1.0;
  doc["dt_min"] = 0.005;
  doc["initial_data"]["density"] = {uniform_profile(0.5), uniform_profile(0.5)};
  doc["initial_data"]["velocity"] = {
      {{"profile", "bump"}, {"offset", 0.0}, {"amplitude", 10.0}, {"center", 0.53125}, {"width", 0.01}},
      {{"profile", "bump"}, {"offset", 0.0}, {"amplitude", -10.0}, {"center", 0.46875}, {"width", 0.01}}};
  return doc;
}

fs::path write_config(const TempDir& dir, const json& doc, const std::string& name = "config.json") {
  const fs::path path = dir / name;
  std::ofstream(path) << doc.dump(2);
  return path;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void flip_last_digit(const fs::path& path) {
  std::string text = read_text(path);
  const auto pos = text.find_last_of("123456789");
  text[pos] = text[pos] == '1' ? '2' : '1';
  std::ofstream(path, std::ios::binary) << text;
}

json read_json(const fs::path& path) { return json::parse(read_text(path)); }

std::string config_error_message(const json& doc) {
  try {
    io::parse_config(doc);
  } catch (const mf::ConfigError& e) {
    return e.what();
  }
  return "";
}

const json* find_entry(const json& verification, const std::string& name) {
  for (const auto& e : verification.at("entries")) {
    if (e.at("name") == name) return &e;
  }
  return nullptr;
}

int run_cli(const std::string& args) {
  const std::string command = std::string("\"") + MULTIFLUID_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsApply) {
  json doc = equilibrium_document();
  doc.erase("final_time");
  doc.erase("snapshot_stride");
  doc.erase("n_cells");
  const io::RunConfig c = io::parse_config(doc);
  EXPECT_EQ(c.cfl, 0.5);
  EXPECT_EQ(c.snapshot_stride, 10);
  EXPECT_EQ(c.n_cells, 64);
  EXPECT_EQ(c.final_time, 1.0);
  EXPECT_EQ(c.dt_max_per_h, 0.5);
  EXPECT_FALSE(c.dt_max.has_value());
  EXPECT_EQ(c.coords, io::Coordinates::euler);
  EXPECT_EQ(c.params.n_components(), 2);
  EXPECT_EQ(c.time_control().dt_max, 0.5 / 64);
}

TEST(Config, RejectsIsothermalIndex) {
  json doc = equilibrium_document();
  doc["polytropic_index"] = 1.0;
  EXPECT_NE(config_error_message(doc).find("polytropic_index must exceed 1"), std::string::npos);
}

TEST(Config, RejectsBadViscosity) {
  json doc = equilibrium_document();
  doc["viscosity"] = {{2.0, 1.0}, {0.5, 2.0}};
  EXPECT_NE(config_error_message(doc), "");
  doc["viscosity"] = {{1.0, 2.0}, {2.0, 1.0}};  // symmetric, indefinite
  EXPECT_NE(config_error_message(doc), "");
  doc["viscosity"] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};  // wrong N for the profiles
  EXPECT_NE(config_error_message(doc), "");
}

TEST(Config, UnknownKeysNameTheirPath) {
  json doc = equilibrium_document();
  doc["initial_data"]["density"][0]["x"] = 1.0;
  EXPECT_NE(config_error_message(doc).find("initial_data.density[0].x"), std::string::npos);
  doc = equilibrium_document();
  doc["cfll"] = 0.4;
  EXPECT_NE(config_error_message(doc).find("cfll"), std::string::npos);
}

TEST(Config, RejectsOutOfRangeScalars) {
  for (const auto& [key, value] : std::vector<std::pair<std::string, json>>{
           {"cfl", 1.5}, {"cfl", 0.0}, {"n_cells", 4}, {"final_time", -1.0}, {"pressure_const", 0.0},
           {"coords", "cartesian"}, {"snapshot_stride", 0}}) {
    json doc = equilibrium_document();
    doc[key] = value;
    EXPECT_NE(config_error_message(doc), "") << key << " = " << value;
  }
}

TEST(Config, RejectsInadmissibleInitialData) {
  json doc = equilibrium_document();
  doc["initial_data"]["density"][0] = {{"profile", "sine"}, {"offset", 0.1}, {"amplitude", 0.5}, {"mode", 2}};
  EXPECT_THROW(io::parse_config(doc).initial_state(), mf::ConfigError);
}

TEST(Config, NormalizedDocumentRoundTrips) {
  json doc = wave_document();
  doc["coords"] = "both";
  doc["tolerances"] = {{"mass_drift", 1e-9}};
  const io::RunConfig c = io::parse_config(doc);
  const json normalized = io::to_json(c);
  const io::RunConfig again = io::parse_config(normalized);
  EXPECT_EQ(io::to_json(again), normalized);
  EXPECT_EQ(again.viscosity, c.viscosity);
  EXPECT_EQ(again.initial_state().rho, c.initial_state().rho);
  EXPECT_EQ(again.coords, io::Coordinates::both);
}

TEST(Config, CsvInitialData) {
  TempDir dir;
  {
    std::ofstream csv(dir / "init.csv");
    csv << "x,rho_1,rho_2,u_1,u_2\n";
    for (int k = 0; k <= 8; ++k) {
      const double x = k / 8.0;
      csv << x << "," << 0.5 + 0.25 * x << "," << 1.0 << "," << 0.0 << "," << 0.0 << "\n";
    }
  }
  json doc = equilibrium_document();
  doc["initial_data"] = {{"csv", "init.csv"}};
  const fs::path path = write_config(dir, doc);
  const io::RunConfig c = io::load_config(path);
  const mf::EulerState s = c.initial_state(16);
  const Eigen::VectorXd x = s.grid.nodes();
  for (int k = 0; k <= 16; ++k) EXPECT_NEAR(s.rho(k, 0), 0.5 + 0.25 * x[k], 1e-15);
}

TEST(Config, LoadFailuresAreConfigErrors) {
  TempDir dir;
  EXPECT_THROW(io::load_config(dir / "missing.json"), mf::ConfigError);
  std::ofstream(dir / "broken.json") << "{\"n_cells\": ";
  EXPECT_THROW(io::load_config(dir / "broken.json"), mf::ConfigError);
}

TEST(Archive, EulerRoundTripIsBitExact) {
  TempDir dir;
  const io::RunConfig c = io::parse_config(wave_document());
  const auto trajectory = mf::simulate(c.physics(), c.initial_state(), c.time_control());
  io::write_archive(dir.path(), trajectory, c);
  const io::LoadedArchive loaded = io::read_archive(dir.path());
  ASSERT_FALSE(loaded.is_lagrangian());
  EXPECT_TRUE(loaded.checksum_ok);
  const auto& back = std::get<mf::EulerTrajectory>(loaded.trajectory);
  ASSERT_EQ(back.snapshots.size(), trajectory.snapshots.size());
  for (std::size_t k = 0; k < back.snapshots.size(); ++k) {
    EXPECT_EQ(back.snapshots[k].time, trajectory.snapshots[k].time);
    EXPECT_EQ(back.snapshots[k].rho, trajectory.snapshots[k].rho);
    EXPECT_EQ(back.snapshots[k].u, trajectory.snapshots[k].u);
    EXPECT_EQ(back.snapshots[k].grid.nodes(), trajectory.snapshots[k].grid.nodes());
  }
  EXPECT_EQ(back.final_state.rho, trajectory.final_state.rho);
  EXPECT_EQ(back.steps, trajectory.steps);
  ASSERT_EQ(back.records.size(), trajectory.records.size());
  for (std::size_t k = 0; k < back.records.size(); ++k) {
    EXPECT_EQ(back.records[k].energy, trajectory.records[k].energy);
    EXPECT_EQ(back.records[k].component_mass, trajectory.records[k].component_mass);
    EXPECT_EQ(back.records[k].beta, trajectory.records[k].beta);
  }
}

TEST(Archive, LagrangeRoundTripIsBitExact) {
  TempDir dir;
  const io::RunConfig c = io::parse_config(wave_document());
  const auto trajectory =
      mf::simulate_lagrange(c.physics(), mf::to_lagrangian(c.initial_state()), c.time_control());
  io::write_archive(dir.path(), trajectory, c);
  const io::LoadedArchive loaded = io::read_archive(dir.path());
  ASSERT_TRUE(loaded.is_lagrangian());
  EXPECT_TRUE(loaded.checksum_ok);
  const auto& back = std::get<mf::LagrangeTrajectory>(loaded.trajectory);
  ASSERT_EQ(back.snapshots.size(), trajectory.snapshots.size());
  for (std::size_t k = 0; k < back.snapshots.size(); ++k) {
    EXPECT_EQ(back.snapshots[k].rho, trajectory.snapshots[k].rho);
    EXPECT_EQ(back.snapshots[k].concentration, trajectory.snapshots[k].concentration);
    EXPECT_EQ(back.snapshots[k].u, trajectory.snapshots[k].u);
    EXPECT_EQ(back.snapshots[k].grid.length(), trajectory.snapshots[k].grid.length());
  }
}

TEST(Archive, TamperingIsDetected) {
  TempDir dir;
  const io::RunConfig c = io::parse_config(wave_document());
  io::write_archive(dir.path(), mf::simulate(c.physics(), c.initial_state(), c.time_control()), c);
  flip_last_digit(dir / "final.csv");
  const io::LoadedArchive loaded = io::read_archive(dir.path());
  EXPECT_FALSE(loaded.checksum_ok);
  EXPECT_NE(loaded.stored_checksum, loaded.computed_checksum);
}

TEST(Archive, MissingOrForeignArchivesThrow) {
  TempDir dir;
  EXPECT_THROW(io::read_archive(dir / "nothing"), io::ArchiveError);
  const io::RunConfig c = io::parse_config(equilibrium_document());
  io::write_archive(dir.path(), mf::simulate(c.physics(), c.initial_state(), c.time_control()), c);
  json manifest = read_json(dir / "manifest.json");
  manifest["format_version"] = io::archive_format_version + 1;
  std::ofstream(dir / "manifest.json") << manifest.dump();
  EXPECT_THROW(io::read_archive(dir.path()), io::ArchiveError);
}

TEST(Simulate, ArchivesAreDeterministic) {
  TempDir dir;
  const fs::path config = write_config(dir, wave_document());
  std::ostringstream out;
  ASSERT_EQ(io::cmd_simulate(config, std::nullopt, dir / "a", out), 0);
  ASSERT_EQ(io::cmd_simulate(config, std::nullopt, dir / "b", out), 0);
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() == ".csv") {
      EXPECT_EQ(read_text(entry.path()), read_text(dir / "b" / name)) << name;
    }
  }
  json a = read_json(dir / "a" / "manifest.json"), b = read_json(dir / "b" / "manifest.json");
  a.erase("timings");
  b.erase("timings");
  EXPECT_EQ(a, b);
}

TEST(Simulate, EquilibriumStaysPut) {
  TempDir dir;
  std::ostringstream out;
  ASSERT_EQ(io::cmd_simulate(write_config(dir, equilibrium_document()), std::nullopt, dir / "run", out), 0);
  const io::LoadedArchive loaded = io::read_archive(dir / "run");
  const auto& t = std::get<mf::EulerTrajectory>(loaded.trajectory);
  EXPECT_NEAR(t.final_state.time, 0.5, 1e-12);
  EXPECT_LT((t.final_state.rho.col(0).array() - 0.3).abs().maxCoeff(), 1e-14);
  EXPECT_LT((t.final_state.rho.col(1).array() - 0.7).abs().maxCoeff(), 1e-14);
  EXPECT_LT(t.final_state.u.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Simulate, BothCoordinatesWriteTwoArchivesAndAComparison) {
  TempDir dir;
  std::ostringstream out;
  ASSERT_EQ(io::cmd_simulate(write_config(dir, wave_document()), io::Coordinates::both, dir / "run", out), 0);
  EXPECT_FALSE(io::read_archive(dir / "run" / "euler").is_lagrangian());
  EXPECT_TRUE(io::read_archive(dir / "run" / "lagrange").is_lagrangian());
  const json comparison = read_json(dir / "run" / "comparison.json");
  EXPECT_LT(comparison.at("sup_distance").get<double>(), 5e-2);
}

TEST(Simulate, AbortedRunExitsWithTwo) {
  TempDir dir;
  std::ostringstream out;
  EXPECT_EQ(io::cmd_simulate(write_config(dir, aborting_document()), std::nullopt, dir / "run", out), 2);
  const io::LoadedArchive loaded = io::read_archive(dir / "run");
  EXPECT_TRUE(std::get<mf::EulerTrajectory>(loaded.trajectory).aborted);
}

TEST(Simulate, ConfigErrorsExitWithThree) {
  TempDir dir;
  json doc = equilibrium_document();
  doc["polytropic_index"] = 0.9;
  std::ostringstream out;
  EXPECT_EQ(io::cmd_simulate(write_config(dir, doc), std::nullopt, dir / "run", out), 3);
  EXPECT_NE(out.str().find("polytropic_index must exceed 1"), std::string::npos);
  EXPECT_EQ(io::cmd_simulate(dir / "absent.json", std::nullopt, dir / "run", out), 3);
}

TEST(Verify, CleanArchivesPass) {
  TempDir dir;
  const fs::path config = write_config(dir, wave_document());
  std::ostringstream out;
  ASSERT_EQ(io::cmd_simulate(config, io::Coordinates::both, dir / "run", out), 0);
  EXPECT_EQ(io::cmd_verify(dir / "run", config, out), 0) << out.str();
  const json lagrange = read_json(dir / "run" / "lagrange" / "verification.json");
  EXPECT_TRUE(lagrange.at("all_passed").get<bool>());
  const json* bounds = find_entry(lagrange, "concentration_exact");
  ASSERT_NE(bounds, nullptr);
  EXPECT_TRUE(bounds->at("exact").get<bool>());
  EXPECT_TRUE(read_json(dir / "run" / "euler" / "verification.json").at("all_passed").get<bool>());
}

TEST(Verify, CorruptedArchiveNamesTheFailure) {
  TempDir dir;
  const fs::path config = write_config(dir, equilibrium_document());
  std::ostringstream out;
  ASSERT_EQ(io::cmd_simulate(config, std::nullopt, dir / "run", out), 0);
  // a negative density in a later snapshot, checksum left stale
  std::string text = read_text(dir / "run" / "snapshot_00001.csv");
  const auto line = text.find('\n', text.find('\n') + 1) + 1;
  const auto comma = text.find(',', line);
  text.replace(comma + 1, 3, "-0.3");
  std::ofstream(dir / "run" / "snapshot_00001.csv", std::ios::binary) << text;

  EXPECT_EQ(io::cmd_verify(dir / "run", config, out), 1);
  const json report = read_json(dir / "run" / "verification.json");
  EXPECT_FALSE(report.at("all_passed").get<bool>());
  EXPECT_FALSE(find_entry(report, "archive_integrity")->at("passed").get<bool>());
  EXPECT_FALSE(find_entry(report, "concentration_bounds")->at("passed").get<bool>());
}

TEST(Verify, MissingArchiveIsAnInputError) {
  TempDir dir;
  std::ostringstream out;
  EXPECT_EQ(io::cmd_verify(dir / "none", write_config(dir, equilibrium_document()), out), 3);
}

TEST(Threads, EnvironmentCapsWorkers) {
  ::setenv("MULTIFLUID_THREADS", "3", 1);
  EXPECT_EQ(io::worker_limit(), 3);
  ::setenv("MULTIFLUID_THREADS", "many", 1);
  EXPECT_THROW(io::worker_limit(), mf::ConfigError);
  ::setenv("MULTIFLUID_THREADS", "0", 1);
  EXPECT_THROW(io::worker_limit(), mf::ConfigError);
  ::unsetenv("MULTIFLUID_THREADS");
  EXPECT_GE(io::worker_limit(), 1);
}

TEST(Threads, ParallelForVisitsEveryIndexAndRethrows) {
  ::setenv("MULTIFLUID_THREADS", "4", 1);
  std::vector<std::atomic<int>> hits(100);
  io::parallel_for(hits.size(), [&](std::size_t k) { ++hits[k]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(io::parallel_for(10,
                                [](std::size_t k) {
                                  if (k == 7) throw std::runtime_error("task 7");
                                }),
               std::runtime_error);
  ::unsetenv("MULTIFLUID_THREADS");
}

TEST(Studies, ConvergenceAndStabilityReportsAreConsistent) {
  TempDir dir;
  json doc = equilibrium_document();
  doc["initial_data"]["velocity"][0] = {{"profile", "sine"}, {"offset", 0.0}, {"amplitude", 0.1}, {"mode", 1}};
  doc["final_time"] = 0.2;
  const fs::path config = write_config(dir, doc);
  std::ostringstream out;
  const int code = io::cmd_convergence(config, {16, 32, 64}, false, dir / "conv.json", out);
  const json conv = read_json(dir / "conv.json");
  EXPECT_EQ(conv.at("rows").size(), 3u);
  EXPECT_EQ(code, conv.at("passed").get<bool>() ? 0 : 1);

  EXPECT_EQ(io::cmd_stability(config, {1e-3, 1e-4}, dir / "stab.json", out), 0) << out.str();
  EXPECT_EQ(read_json(dir / "stab.json").at("rows").size(), 2u);

  EXPECT_EQ(io::cmd_convergence(config, {64, 32, 16}, false, std::nullopt, out), 3);
  EXPECT_EQ(io::cmd_convergence(config, {16, 32, 64}, true, std::nullopt, out), 3);  // no mms block
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const fs::path good = write_config(dir, equilibrium_document(), "good.json");
  json bad_doc = equilibrium_document();
  bad_doc["polytropic_index"] = 1.0;
  const fs::path bad = write_config(dir, bad_doc, "bad.json");
  const fs::path aborting = write_config(dir, aborting_document(), "abort.json");
  const std::string out = (dir / "run").string();

  EXPECT_EQ(run_cli(""), 3);
  EXPECT_EQ(run_cli("simulate"), 3);
  EXPECT_EQ(run_cli("simulate --config " + bad.string() + " --out " + out), 3);
  EXPECT_EQ(run_cli("simulate --config " + good.string() + " --coords sideways --out " + out), 3);
  EXPECT_EQ(run_cli("simulate --config " + good.string() + " --out " + out), 0);
  EXPECT_EQ(run_cli("verify --archive " + out + " --config " + good.string()), 0);
  flip_last_digit(dir / "run" / "final.csv");
  EXPECT_EQ(run_cli("verify --archive " + out + " --config " + good.string()), 1);
  EXPECT_EQ(run_cli("simulate --config " + aborting.string() + " --out " + (dir / "abort").string()), 2);
  EXPECT_EQ(run_cli("stability --config " + good.string() + " --deltas 1e-3,x"), 3);
}
