#pragma once

// Numeric CSV with one header line. Numbers are written with 17 significant
// digits, which strtod reads back bit-exactly.

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace multifluid::io::detail {

struct Table {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;

  /// Index of `name`, or -1.
  Eigen::Index column(const std::string& name) const;
};

std::string format_number(double value);
std::string to_csv(const Table& table);
/// Throws std::runtime_error naming the file and line on malformed input.
Table read_csv(const std::filesystem::path& path);
Table parse_csv(const std::string& text, const std::string& origin);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace multifluid::io::detail
