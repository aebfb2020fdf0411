#include "glle/csv.hpp"

#include "glle/common.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace glle::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const Eigen::MatrixXd& values) {
  require(static_cast<Eigen::Index>(header.size()) == values.cols(),
          "header width must match the number of columns");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  Table table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      for (auto& f : split(line)) table.header.push_back(trim(f));
      if (table.header.empty() || table.header.front().empty())
        throw ParseError("empty header", line_no);
      continue;
    }
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != table.header.size())
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& raw : fields) {
      const std::string f = trim(raw);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
        throw ParseError("non-numeric field '" + f + "'", line_no);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (line_no == 0) throw ParseError("empty file", 1);

  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

}  // namespace glle::csv
