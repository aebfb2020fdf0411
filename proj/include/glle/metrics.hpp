#pragma once

#include "glle/common.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace glle {

/// Mean over points of |kNN_in(i) ∩ kNN_emb(i)| / k.
double neighborhood_preservation(const Eigen::MatrixXd& input, const Eigen::MatrixXd& embedded,
                                 Index k, int threads = 1);

/// min over orthogonal Q of ||A - B Q||_F / ||A||_F (reflections allowed).
double procrustes_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct ComparisonReport {
  double neighborhood_preservation = 0.0;
  double procrustes_residual = 0.0;
  std::vector<std::pair<std::uint64_t, double>> per_generation;
};

/// One row of the metrics CSV.
struct MetricsRow {
  std::string method;
  std::uint64_t seed = 0;
  double scale = 1.0;
  double preservation = 0.0;
  double procrustes_vs_lle = 0.0;
};

/// Header method,seed,scale,preservation,procrustes_vs_lle.
void save_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);

}  // namespace glle
