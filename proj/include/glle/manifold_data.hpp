#pragma once

#include "glle/common.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>

namespace glle {

/// Point cloud with one row per point plus an intrinsic coordinate used to
/// color plots.
struct Dataset {
  Eigen::MatrixXd points;  // n x d
  Eigen::VectorXd param;   // n
  std::string name;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

/// Throws InvalidArgument if the dataset is empty, has mismatched param
/// length, or non-finite coordinates.
void validate(const Dataset& ds);

// Fixed geometry of the synthetic generators.
namespace geometry {
inline constexpr double kPi = 3.14159265358979323846;

// S-curve: t in [-3pi/2, 3pi/2], u in [0, 2].
inline constexpr double kSCurveTMin = -1.5 * kPi;
inline constexpr double kSCurveTMax = 1.5 * kPi;
inline constexpr double kSCurveHeight = 2.0;

// Swiss roll: t in [1.5pi, 4.5pi], u in [0, 21].
inline constexpr double kSwissTMin = 1.5 * kPi;
inline constexpr double kSwissTMax = 4.5 * kPi;
inline constexpr double kSwissHeight = 21.0;

// Hole: centered rectangle in (t, u) covering 25% of the t range and 40% of
// the u range, i.e. 10% of the parameter area.
inline constexpr double kHoleTCenter = 3.0 * kPi;
inline constexpr double kHoleTHalfWidth = 0.375 * kPi;
inline constexpr double kHoleUCenter = 10.5;
inline constexpr double kHoleUHalfWidth = 4.2;

// Severed bowl: lower unit hemisphere, polar angle (from the bottom pole)
// capped at 0.95 * pi/2, with the side x > kBowlSeverX cut away.
inline constexpr double kBowlMaxPolar = 0.95 * 0.5 * kPi;
inline constexpr double kBowlSeverX = 0.6;

inline bool in_hole(double t, double u) {
  return t > kHoleTCenter - kHoleTHalfWidth && t < kHoleTCenter + kHoleTHalfWidth &&
         u > kHoleUCenter - kHoleUHalfWidth && u < kHoleUCenter + kHoleUHalfWidth;
}
}  // namespace geometry

Dataset gen_s_curve(Index n, std::uint64_t seed);
Dataset gen_swiss_roll(Index n, bool with_hole, std::uint64_t seed);
Dataset gen_severed_bowl(Index n, std::uint64_t seed);

/// Writes header `x0,...,x{d-1},param` and one row per point, 17 significant
/// digits, LF line endings.
void save_csv(const Dataset& ds, const std::filesystem::path& path);

/// Inverse of save_csv. The last column is the param; the number of
/// coordinate columns is inferred from the header. Throws ParseError with
/// the offending line number on malformed input.
Dataset load_csv(const std::filesystem::path& path);

}  // namespace glle
