#include "hardi/sphere.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace hardi {

std::vector<UnitDirection> spiral_hemisphere(int k) {
  if (k < 1) throw std::invalid_argument("spiral_hemisphere: k must be >= 1");

  std::vector<UnitDirection> out;
  out.reserve(k);
  out.push_back({0.0, 0.0, 1.0});
  if (k == 1) return out;

  // Nominal point spacing for k points in hemisphere area 2*pi assuming
  // hexagonal packing: d = sqrt(4*pi / (sqrt(3)*k)). The azimuth advances by
  // d / sin(theta) per step so arc-length spacing matches coil spacing.
  const double c = std::sqrt(4.0 * kPi / std::sqrt(3.0));
  const double step = c / std::sqrt(static_cast<double>(k));
  double phi = 0.0;
  for (int i = 1; i < k; ++i) {
    const double z = 1.0 - static_cast<double>(i) / (k - 1);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    phi += step / s;
    out.push_back({s * std::cos(phi), s * std::sin(phi), z});
  }
  return out;
}

namespace {

struct IcoMesh {
  std::vector<UnitDirection> vertices;
  std::vector<std::array<int, 3>> faces;
};

IcoMesh base_icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoMesh mesh;
  const double raw[12][3] = {
      {-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (const auto& v : raw) {
    mesh.vertices.push_back(UnitDirection::normalized(v[0], v[1], v[2]));
  }
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return mesh;
}

IcoMesh subdivide(const IcoMesh& mesh) {
  IcoMesh out;
  out.vertices = mesh.vertices;
  // Shared edge midpoints are deduplicated by edge key, so each midpoint is
  // created exactly once.
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const UnitDirection& va = out.vertices[a];
    const UnitDirection& vb = out.vertices[b];
    out.vertices.push_back(
        UnitDirection::normalized(va.x + vb.x, va.y + vb.y, va.z + vb.z));
    const int idx = static_cast<int>(out.vertices.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  out.faces.reserve(mesh.faces.size() * 4);
  for (const auto& f : mesh.faces) {
    const int ab = mid(f[0], f[1]);
    const int bc = mid(f[1], f[2]);
    const int ca = mid(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

}  // namespace

Tessellation icosphere(int order) {
  if (order < 0) throw std::invalid_argument("icosphere: order must be >= 0");
  if (order > 6) throw std::invalid_argument("icosphere: order capped at 6");

  IcoMesh mesh = base_icosahedron();
  for (int i = 0; i < order; ++i) mesh = subdivide(mesh);

  Tessellation tess;
  tess.order = order;
  tess.vertices = std::move(mesh.vertices);
  std::vector<std::set<int>> adj(tess.vertices.size());
  for (const auto& f : mesh.faces) {
    adj[f[0]].insert({f[1], f[2]});
    adj[f[1]].insert({f[0], f[2]});
    adj[f[2]].insert({f[0], f[1]});
  }
  tess.neighbors.reserve(adj.size());
  for (auto& s : adj) tess.neighbors.emplace_back(s.begin(), s.end());
  return tess;
}

double legendre(int n, double t) {
  if (n < 0) throw std::invalid_argument("legendre: n must be >= 0");
  if (std::abs(t) > 1.0) throw std::invalid_argument("legendre: |t| must be <= 1");
  if (n == 0) return 1.0;
  double pm1 = 1.0;
  double p = t;
  for (int k = 1; k < n; ++k) {
    const double next = ((2 * k + 1) * t * p - k * pm1) / (k + 1);
    pm1 = p;
    p = next;
  }
  return p;
}

std::vector<double> legendre_sequence(int n_max, double t) {
  if (n_max < 0) throw std::invalid_argument("legendre_sequence: n_max must be >= 0");
  if (std::abs(t) > 1.0) throw std::invalid_argument("legendre_sequence: |t| must be <= 1");
  std::vector<double> out(n_max + 1);
  out[0] = 1.0;
  if (n_max == 0) return out;
  out[1] = t;
  for (int k = 1; k < n_max; ++k) {
    out[k + 1] = ((2 * k + 1) * t * out[k] - k * out[k - 1]) / (k + 1);
  }
  return out;
}

double legendre_expansion(const std::vector<double>& coef, double t) {
  if (coef.empty()) return 0.0;
  if (std::abs(t) > 1.0) throw std::invalid_argument("legendre_expansion: |t| must be <= 1");
  double acc = coef[0];
  if (coef.size() == 1) return acc;
  double pm1 = 1.0;
  double p = t;
  acc += coef[1] * p;
  for (std::size_t k = 1; k + 1 < coef.size(); ++k) {
    const double next = ((2 * k + 1) * t * p - k * pm1) / (k + 1);
    pm1 = p;
    p = next;
    acc += coef[k + 1] * p;
  }
  return acc;
}

}  // namespace hardi
