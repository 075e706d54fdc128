#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hardi {

inline constexpr double kPi = 3.14159265358979323846;

/// Point on the unit sphere. Aggregate-construct only with coordinates that
/// are already unit-norm; otherwise go through normalized().
struct UnitDirection {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  static UnitDirection normalized(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("UnitDirection: cannot normalize zero or non-finite vector");
    }
    return {x / n, y / n, z / n};
  }

  double dot(const UnitDirection& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  UnitDirection operator-() const { return {-x, -y, -z}; }
};

inline double clamp_unit(double t) { return t < -1.0 ? -1.0 : (t > 1.0 ? 1.0 : t); }

/// Angle between two directions in degrees.
inline double angle_deg(const UnitDirection& a, const UnitDirection& b) {
  return std::acos(clamp_unit(a.dot(b))) * 180.0 / kPi;
}

/// Angle between the axes spanned by two directions (antipodally invariant).
inline double axial_angle_deg(const UnitDirection& a, const UnitDirection& b) {
  return std::acos(clamp_unit(std::abs(a.dot(b)))) * 180.0 / kPi;
}

/// Extents of the voxel lattice. Linear voxel order is x-major:
/// index = (x * ny + y) * nz + z.
struct GridDims {
  int nx = 1;
  int ny = 1;
  int nz = 1;

  std::int64_t voxel_count() const {
    return static_cast<std::int64_t>(nx) * ny * nz;
  }
  std::int64_t index(int x, int y, int z) const {
    return (static_cast<std::int64_t>(x) * ny + y) * nz + z;
  }
  bool operator==(const GridDims&) const = default;
};

}  // namespace hardi
