#include "glle/metrics.hpp"

#include "glle/csv.hpp"
#include "glle/neighborhood.hpp"

#include <algorithm>
#include <fstream>

namespace glle {

double neighborhood_preservation(const Eigen::MatrixXd& input, const Eigen::MatrixXd& embedded,
                                 Index k, int threads) {
  const Index n = input.rows();
  require(embedded.rows() == n, "neighborhood_preservation: point counts differ");
  require(k >= 1 && k < n, "neighborhood_preservation: need 1 <= k < n");
  const NeighborhoodGraph a = build_knn(input, k, threads);
  const NeighborhoodGraph b = build_knn(embedded, k, threads);
  double total = 0.0;
  std::vector<Index> ra(static_cast<std::size_t>(k));
  std::vector<Index> rb(static_cast<std::size_t>(k));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) {
      ra[static_cast<std::size_t>(j)] = a.indices(i, j);
      rb[static_cast<std::size_t>(j)] = b.indices(i, j);
    }
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    std::vector<Index> common;
    std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(common));
    total += static_cast<double>(common.size()) / static_cast<double>(k);
  }
  return total / static_cast<double>(n);
}

double procrustes_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "procrustes_residual: shapes differ");
  const double norm_a = a.norm();
  require(norm_a > 0.0, "procrustes_residual: reference matrix is zero");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.transpose() * a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd q = svd.matrixU() * svd.matrixV().transpose();
  return (a - b * q).norm() / norm_a;
}

void save_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "method,seed,scale,preservation,procrustes_vs_lle\n";
  for (const auto& r : rows)
    out << r.method << ',' << r.seed << ',' << csv::format_double(r.scale) << ','
        << csv::format_double(r.preservation) << ',' << csv::format_double(r.procrustes_vs_lle)
        << '\n';
}

}  // namespace glle
