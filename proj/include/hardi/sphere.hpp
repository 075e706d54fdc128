#pragma once

#include <vector>

#include "hardi/types.hpp"

namespace hardi {

/// Quasi-uniform sampling of the northern hemisphere (z >= 0) along a
/// generalized spiral. The first point sits exactly on the pole; heights
/// descend uniformly to the equator while the azimuth advances so that the
/// spacing along the spiral matches the spacing between coils. Deterministic
/// for fixed k.
std::vector<UnitDirection> spiral_hemisphere(int k);

/// Geodesic sphere obtained by subdividing the icosahedron. Vertex count is
/// 10 * 4^order + 2; adjacency is symmetric with valence 5 or 6.
struct Tessellation {
  std::vector<UnitDirection> vertices;
  std::vector<std::vector<int>> neighbors;
  int order = 0;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
};

Tessellation icosphere(int order);

/// Legendre polynomial P_n(t) for |t| <= 1 via the three-term recurrence.
double legendre(int n, double t);

/// P_0(t) .. P_n_max(t) in one sweep.
std::vector<double> legendre_sequence(int n_max, double t);

/// Evaluates sum_n coef[n] * P_n(t); the zonal-expansion workhorse used for
/// ridgelet and kernel evaluation.
double legendre_expansion(const std::vector<double>& coef, double t);

}  // namespace hardi
