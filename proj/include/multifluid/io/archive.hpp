#pragma once

// On-disk trajectories. An archive directory holds
//   manifest.json      format version, config echo, timings, counts, checksum
//   snapshot_NNNNN.csv one per snapshot: x (or y), rho_1..rho_N, u_1..u_N;
//                      Lagrangian archives add rho and c_1..c_N
//   final.csv          the final state, same columns
//   diagnostics.csv    t, E, dissipation, mass_1..mass_N, min_rho, max_rho,
//                      lograd_norm, beta (one row per step)
// Numbers are written with 17 significant digits, so reading an archive back
// reproduces every array bit for bit. The checksum (FNV-1a, 64 bit) covers
// all CSV files in the order above.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "multifluid/io/config.hpp"

namespace multifluid::io {

inline constexpr int archive_format_version = 1;

struct ArchiveTimings {
  double wall_seconds = 0.0;
};

/// Raised for a missing or unreadable archive and for a format-version mismatch.
class ArchiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

void write_archive(const std::filesystem::path& dir, const EulerTrajectory& trajectory, const RunConfig& config,
                   const ArchiveTimings& timings = {});
void write_archive(const std::filesystem::path& dir, const LagrangeTrajectory& trajectory, const RunConfig& config,
                   const ArchiveTimings& timings = {});

struct LoadedArchive {
  nlohmann::json manifest;
  std::variant<EulerTrajectory, LagrangeTrajectory> trajectory;
  /// Checksum recomputed from the files on disk matches the manifest.
  bool checksum_ok = false;
  std::string stored_checksum;
  std::string computed_checksum;

  bool is_lagrangian() const { return trajectory.index() == 1; }
};

/// Throws ArchiveError when the directory or manifest is missing, the format
/// version differs, or a file cannot be parsed. A checksum mismatch is not an
/// error here; it is reported through checksum_ok.
LoadedArchive read_archive(const std::filesystem::path& dir);

}  // namespace multifluid::io
