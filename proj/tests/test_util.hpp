#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <random>
#include <string>

namespace glle::test {

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = dist(rng);
  return m;
}

/// Random SPD matrix with eigenvalues bounded away from zero.
inline Eigen::MatrixXd random_spd(Eigen::Index m, std::mt19937_64& rng, double floor = 0.5) {
  const Eigen::MatrixXd a = random_matrix(m, m, rng);
  return a * a.transpose() + floor * Eigen::MatrixXd::Identity(m, m);
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index m, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(m, m, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
}

inline std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "glle_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace glle::test
