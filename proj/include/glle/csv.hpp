#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace glle::csv {

struct Table {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Round-trip exact formatting of a double ("%.17g").
std::string format_double(double v);

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& values);

/// Numeric table with a header row. Column count comes from the header.
Table read_table(const std::filesystem::path& path);

}  // namespace glle::csv
