#pragma once

// Test-only oracles, independent of the library implementation paths they
// check: great-circle quadrature for the Funk-Radon transform, the exact 1-D
// total-variation prox (taut string), a dense least-squares fit for ODF
// ground truth, and a deterministic RNG for property tests.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hardi/dictionary.hpp"
#include "hardi/field.hpp"
#include "hardi/types.hpp"

namespace oracles {

/// 512-point trapezoid quadrature of atom m over the great circle
/// perpendicular to v.
inline double great_circle_quadrature(const hardi::Dictionary& dict, int m,
                                      const hardi::UnitDirection& v, int points = 512) {
  Eigen::Vector3d w(v.x, v.y, v.z);
  Eigen::Vector3d helper = std::abs(w.x()) > 0.9 ? Eigen::Vector3d(0, 1, 0)
                                                 : Eigen::Vector3d(1, 0, 0);
  const Eigen::Vector3d e1 = w.cross(helper).normalized();
  const Eigen::Vector3d e2 = w.cross(e1).normalized();
  double acc = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = 2.0 * hardi::kPi * i / points;
    const Eigen::Vector3d u = std::cos(t) * e1 + std::sin(t) * e2;
    acc += dict.evaluate(m, hardi::UnitDirection{u.x(), u.y(), u.z()});
  }
  return acc * (2.0 * hardi::kPi / points);
}

/// Exact minimizer of 0.5*||x - y||^2 + lam * sum |x_{i+1} - x_i|
/// (taut-string / direct algorithm, Condat 2013).
inline std::vector<double> tv1d_prox_exact(const std::vector<double>& input, double lam) {
  const int width = static_cast<int>(input.size());
  std::vector<double> output(width);
  if (width == 0) return output;
  if (width == 1 || lam <= 0.0) {
    output = input;
    return output;
  }
  int k = 0, k0 = 0, kplus = 0, kminus = 0;
  double umin = lam, umax = -lam;
  double vmin = input[0] - lam, vmax = input[0] + lam;
  const double twolam = 2.0 * lam;
  const double minlam = -lam;
  for (;;) {
    while (k == width - 1) {
      if (umin < 0.0) {
        do {
          output[k0++] = vmin;
        } while (k0 <= kminus);
        umax = (vmin = input[kminus = k = k0]) + (umin = lam) - vmax;
      } else if (umax > 0.0) {
        do {
          output[k0++] = vmax;
        } while (k0 <= kplus);
        umin = (vmax = input[kplus = k = k0]) + (umax = minlam) - vmin;
      } else {
        vmin += umin / (k - k0 + 1);
        do {
          output[k0++] = vmin;
        } while (k0 <= k);
        return output;
      }
    }
    if (input[k + 1] + umin < vmin - lam) {
      do {
        output[k0++] = vmin;
      } while (k0 <= kminus);
      vmax = (vmin = input[kplus = kminus = k = k0]) + twolam;
      umin = lam;
      umax = minlam;
    } else if (input[k + 1] + umax > vmax + lam) {
      do {
        output[k0++] = vmax;
      } while (k0 <= kplus);
      vmin = (vmax = input[kplus = kminus = k = k0]) - twolam;
      umin = lam;
      umax = minlam;
    } else {
      ++k;
      umin += input[k] - vmin;
      umax += input[k] - vmax;
      if (umin >= lam) {
        vmin += (umin - lam) / (k - k0 + 1);
        umin = lam;
        kminus = k;
      }
      if (umax <= minlam) {
        vmax += (umax + lam) / (k - k0 + 1);
        umax = minlam;
        kplus = k;
      }
    }
  }
}

/// Ridge-stabilized dense least-squares fit of dictionary coefficients to a
/// signal sampled at the given directions.
inline Eigen::VectorXd dense_fit(const hardi::SensingMatrix& a, const Eigen::VectorXd& s) {
  const Eigen::MatrixXd& m = a.entries;
  const Eigen::MatrixXd gram =
      m.transpose() * m + 1e-10 * Eigen::MatrixXd::Identity(m.cols(), m.cols());
  return gram.ldlt().solve(m.transpose() * s);
}

/// Deterministic uniform/normal draws for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  hardi::UnitDirection direction() {
    for (;;) {
      const double x = normal(), y = normal(), z = normal();
      const double n = std::sqrt(x * x + y * y + z * z);
      if (n > 1e-6) return {x / n, y / n, z / n};
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline hardi::VectorField random_field(Rng& rng, hardi::GridDims dims, int channels) {
  hardi::VectorField f(dims, channels);
  for (double& x : f.data()) x = rng.normal();
  return f;
}

}  // namespace oracles
