#include "glle/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace glle {

namespace {

// Samples of the viridis map at t = 0, 0.25, 0.5, 0.75, 1.
constexpr std::array<std::array<double, 3>, 5> kAnchors{{
    {68, 1, 84},
    {59, 82, 139},
    {33, 145, 140},
    {94, 201, 98},
    {253, 231, 37},
}};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::array<int, 3> ramp_color(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double pos = t * static_cast<double>(kAnchors.size() - 1);
  const std::size_t lo = std::min<std::size_t>(static_cast<std::size_t>(pos), kAnchors.size() - 2);
  const double f = pos - static_cast<double>(lo);
  std::array<int, 3> rgb{};
  for (std::size_t c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(kAnchors[lo][c] + f * (kAnchors[lo + 1][c] - kAnchors[lo][c])));
  return rgb;
}

std::string svg_scatter(const Eigen::MatrixXd& coords, const Eigen::VectorXd& param,
                        const std::string& title) {
  require(coords.cols() == 2, "render_svg: embedding must be 2-D (p = 2)");
  require(param.size() == coords.rows(), "render_svg: param length must match the embedding");

  const double size = kSvgSize;
  const double margin = kSvgMargin * size;
  const double span = size - 2.0 * margin;
  auto axis = [&](Eigen::Index c) {
    double lo = coords.rows() ? coords.col(c).minCoeff() : 0.0;
    double hi = coords.rows() ? coords.col(c).maxCoeff() : 1.0;
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    return std::pair{lo, hi};
  };
  const auto [x0, x1] = axis(0);
  const auto [y0, y1] = axis(1);
  const double p0 = param.size() ? param.minCoeff() : 0.0;
  const double p1 = param.size() ? param.maxCoeff() : 0.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSvgSize << "\" height=\""
      << kSvgSize << "\" viewBox=\"0 0 " << kSvgSize << ' ' << kSvgSize << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) out << "<title>" << escape(title) << "</title>\n";
  out << "<g stroke=\"none\">\n";
  char buf[160];
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    const double px = margin + span * (coords(i, 0) - x0) / (x1 - x0);
    const double py = size - margin - span * (coords(i, 1) - y0) / (y1 - y0);
    const double t = p1 > p0 ? (param(i) - p0) / (p1 - p0) : 0.5;
    const auto rgb = ramp_color(t);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"#%02x%02x%02x\"/>\n",
                  px, py, rgb[0], rgb[1], rgb[2]);
    out << buf;
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void render_svg(const Eigen::MatrixXd& coords, const Eigen::VectorXd& param,
                const std::filesystem::path& path, const std::string& title) {
  const std::string doc = svg_scatter(coords, param, title);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc;
}

}  // namespace glle
