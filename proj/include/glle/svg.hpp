#pragma once

#include "glle/common.hpp"

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <string>

namespace glle {

inline constexpr int kSvgSize = 800;
inline constexpr double kSvgMargin = 0.05;

/// RGB on a viridis-like ramp for t in [0, 1] (clamped).
std::array<int, 3> ramp_color(double t);

/// Standalone 800x800 SVG scatter of a 2-D embedding, one circle per point,
/// colored by param over its range. Throws InvalidArgument unless p == 2.
std::string svg_scatter(const Eigen::MatrixXd& coords, const Eigen::VectorXd& param,
                        const std::string& title = "");

void render_svg(const Eigen::MatrixXd& coords, const Eigen::VectorXd& param,
                const std::filesystem::path& path, const std::string& title = "");

}  // namespace glle
