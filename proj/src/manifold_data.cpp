#include "glle/manifold_data.hpp"

#include "glle/csv.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

namespace glle {

using namespace geometry;

void validate(const Dataset& ds) {
  require(ds.points.rows() >= 1 && ds.points.cols() >= 1, "dataset must have n >= 1 and d >= 1");
  require(ds.param.size() == ds.points.rows(), "param length must equal the number of points");
  require(ds.points.allFinite(), "dataset coordinates must be finite");
}

Dataset gen_s_curve(Index n, std::uint64_t seed) {
  require(n >= 1, "n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(kSCurveTMin, kSCurveTMax);
  std::uniform_real_distribution<double> uu(0.0, kSCurveHeight);
  Dataset ds{Eigen::MatrixXd(n, 3), Eigen::VectorXd(n), "s-curve"};
  for (Index i = 0; i < n; ++i) {
    const double t = ut(rng);
    const double u = uu(rng);
    const double sgn = t < 0.0 ? -1.0 : 1.0;
    ds.points.row(i) << std::sin(t), u, sgn * (std::cos(t) - 1.0);
    ds.param(i) = t;
  }
  return ds;
}

Dataset gen_swiss_roll(Index n, bool with_hole, std::uint64_t seed) {
  require(n >= 1, "n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(kSwissTMin, kSwissTMax);
  std::uniform_real_distribution<double> uu(0.0, kSwissHeight);
  Dataset ds{Eigen::MatrixXd(n, 3), Eigen::VectorXd(n), with_hole ? "swiss-roll-hole" : "swiss-roll"};
  for (Index i = 0; i < n;) {
    const double t = ut(rng);
    const double u = uu(rng);
    if (with_hole && in_hole(t, u)) continue;
    ds.points.row(i) << t * std::cos(t), u, t * std::sin(t);
    ds.param(i) = t;
    ++i;
  }
  return ds;
}

Dataset gen_severed_bowl(Index n, std::uint64_t seed) {
  require(n >= 1, "n must be >= 1");
  std::mt19937_64 rng(seed);
  // Uniform by area on the sphere means cos(polar) is uniform.
  std::uniform_real_distribution<double> ucos(std::cos(kBowlMaxPolar), 1.0);
  std::uniform_real_distribution<double> uphi(-kPi, kPi);
  Dataset ds{Eigen::MatrixXd(n, 3), Eigen::VectorXd(n), "severed-bowl"};
  for (Index i = 0; i < n;) {
    const double c = ucos(rng);
    const double phi = uphi(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double x = s * std::cos(phi);
    if (x > kBowlSeverX) continue;
    Eigen::Vector3d p(x, s * std::sin(phi), -c);
    p.normalize();
    ds.points.row(i) = p.transpose();
    ds.param(i) = std::acos(std::clamp(c, -1.0, 1.0));
    ++i;
  }
  return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  validate(ds);
  std::vector<std::string> header;
  for (Index j = 0; j < ds.dim(); ++j) header.push_back("x" + std::to_string(j));
  header.emplace_back("param");
  Eigen::MatrixXd table(ds.size(), ds.dim() + 1);
  table << ds.points, ds.param;
  csv::write_table(path, header, table);
}

Dataset load_csv(const std::filesystem::path& path) {
  const auto table = csv::read_table(path);
  if (table.values.cols() < 2)
    throw ParseError("expected at least one coordinate column plus param", 1);
  if (table.values.rows() < 1) throw ParseError("no data rows", 2);
  const Index d = table.values.cols() - 1;
  Dataset ds;
  ds.points = table.values.leftCols(d);
  ds.param = table.values.col(d);
  ds.name = path.stem().string();
  return ds;
}

}  // namespace glle
