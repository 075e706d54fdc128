#include "hardi/phantom.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace hardi {

Tensor axisymmetric_tensor(double axial, double radial, const UnitDirection& axis) {
  if (!(axial > 0.0) || !(radial > 0.0)) {
    throw std::invalid_argument("axisymmetric_tensor: diffusivities must be positive");
  }
  const Eigen::Vector3d v(axis.x, axis.y, axis.z);
  return radial * Eigen::Matrix3d::Identity() + (axial - radial) * v * v.transpose();
}

double mean_diffusivity(const Tensor& d) { return d.trace() / 3.0; }

double fractional_anisotropy(const Tensor& d) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(d);
  const Eigen::Vector3d ev = eig.eigenvalues();
  const double md = ev.mean();
  const double num = (ev.array() - md).square().sum();
  const double den = ev.array().square().sum();
  if (den == 0.0) return 0.0;
  return std::sqrt(1.5 * num / den);
}

std::vector<int> Phantom::component_counts() const {
  std::vector<int> out(voxels.size());
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    out[i] = static_cast<int>(voxels[i].components.size());
  }
  return out;
}

std::vector<std::vector<UnitDirection>> Phantom::fiber_directions() const {
  std::vector<std::vector<UnitDirection>> out(voxels.size());
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    for (const FiberComponent& fc : voxels[i].components) {
      out[i].push_back(fc.principal_direction);
    }
  }
  return out;
}

double synth_signal(const VoxelModel& model, double b, const UnitDirection& u) {
  if (b < 0.0) throw std::invalid_argument("synth_signal: b must be >= 0");
  const Eigen::Vector3d uv(u.x, u.y, u.z);
  double acc = 0.0;
  for (const FiberComponent& fc : model.components) {
    acc += fc.weight * std::exp(-b * uv.dot(fc.tensor * uv));
  }
  return model.s0 * acc;
}

namespace {

constexpr double kAxialDiffusivity = 1700e-6;
constexpr double kRadialDiffusivity = 300e-6;

FiberComponent make_fiber(const UnitDirection& dir) {
  FiberComponent fc;
  fc.tensor = axisymmetric_tensor(kAxialDiffusivity, kRadialDiffusivity, dir);
  fc.principal_direction = dir;
  return fc;
}

void finalize_weights(VoxelModel& voxel) {
  const double w = 1.0 / static_cast<double>(voxel.components.size());
  for (FiberComponent& fc : voxel.components) fc.weight = w;
}

}  // namespace

Phantom make_phantom1() {
  Phantom ph;
  ph.name = "phantom1";
  ph.dims = {12, 12, 1};
  ph.voxels.resize(ph.dims.voxel_count());

  const UnitDirection ex{1.0, 0.0, 0.0};
  const UnitDirection ey{0.0, 1.0, 0.0};
  const UnitDirection ez{0.0, 0.0, 1.0};
  for (int x = 0; x < ph.dims.nx; ++x) {
    for (int y = 0; y < ph.dims.ny; ++y) {
      VoxelModel& voxel = ph.voxels[ph.dims.index(x, y, 0)];
      voxel.components.push_back(make_fiber(ez));  // through-plane flow everywhere
      if (y == 5 || y == 6) voxel.components.push_back(make_fiber(ex));
      if (x == 5 || x == 6) voxel.components.push_back(make_fiber(ey));
      finalize_weights(voxel);
    }
  }
  return ph;
}

Phantom make_phantom2() {
  Phantom ph;
  ph.name = "phantom2";
  ph.dims = {16, 16, 1};
  ph.voxels.resize(ph.dims.voxel_count());

  const UnitDirection ex{1.0, 0.0, 0.0};
  const UnitDirection ey{0.0, 1.0, 0.0};
  const UnitDirection ez{0.0, 0.0, 1.0};
  const double cx = 7.5, cy = 7.5, radius = 6.0;
  for (int x = 0; x < ph.dims.nx; ++x) {
    for (int y = 0; y < ph.dims.ny; ++y) {
      VoxelModel& voxel = ph.voxels[ph.dims.index(x, y, 0)];
      voxel.components.push_back(make_fiber(ez));
      if (y == 7 || y == 8) voxel.components.push_back(make_fiber(ex));
      if (x == 7 || x == 8) voxel.components.push_back(make_fiber(ey));
      const double dx = x - cx, dy = y - cy;
      const double r = std::hypot(dx, dy);
      if (std::abs(r - radius) <= 0.5) {
        // local tangent of the circle, exactly orthogonal to the radius vector
        voxel.components.push_back(make_fiber(UnitDirection::normalized(-dy, dx, 0.0)));
      }
      finalize_weights(voxel);
    }
  }
  return ph;
}

SignalField sample_field(const Phantom& phantom, const std::vector<UnitDirection>& directions,
                         double b) {
  SignalField s(phantom.dims, static_cast<int>(directions.size()));
  const std::int64_t n = s.voxel_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < n; ++v) {
    double* row = s.voxel(v);
    for (std::size_t k = 0; k < directions.size(); ++k) {
      row[k] = synth_signal(phantom.voxels[v], b, directions[k]);
    }
  }
  return s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Standard normal pairs via Box-Muller on top of splitmix64; fully specified
// so noise fields are bit-reproducible.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t voxel) {
    state_ = seed ^ 0x6a09e667f3bcc909ULL;
    (void)splitmix64(state_);
    state_ ^= voxel * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82bULL;
    (void)splitmix64(state_);
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 =
        (static_cast<double>(splitmix64(state_) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

double noise_norm(const SignalField& clean, const std::vector<double>& z1,
                  const std::vector<double>& z2, double sigma) {
  const std::int64_t voxels = clean.voxel_count();
  const int ch = clean.channels();
  std::vector<double> partial(static_cast<std::size_t>(voxels));
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < voxels; ++v) {
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) {
      const std::int64_t i = v * ch + c;
      const double s = clean.data()[i];
      const double noisy = std::hypot(s + sigma * z1[i], sigma * z2[i]);
      const double d = noisy - s;
      acc += d * d;
    }
    partial[static_cast<std::size_t>(v)] = acc;
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return std::sqrt(acc);
}

}  // namespace

NoiseResult add_rician_noise(const SignalField& clean, double target_snr_db,
                             std::uint64_t seed) {
  NoiseResult result;
  if (std::isinf(target_snr_db) && target_snr_db > 0.0) {
    result.field = clean;
    result.achieved_snr_db = std::numeric_limits<double>::infinity();
    result.sigma = 0.0;
    return result;
  }
  if (!std::isfinite(target_snr_db)) {
    throw std::invalid_argument("add_rician_noise: target SNR must be finite or +inf");
  }

  const std::int64_t voxels = clean.voxel_count();
  const int ch = clean.channels();
  std::vector<double> z1(clean.data().size());
  std::vector<double> z2(clean.data().size());
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < voxels; ++v) {
    NormalStream stream(seed, static_cast<std::uint64_t>(v));
    for (int c = 0; c < ch; ++c) {
      z1[v * ch + c] = stream.next();
      z2[v * ch + c] = stream.next();
    }
  }

  const double signal_norm = l2_norm(clean);
  const double target_noise = signal_norm * std::pow(10.0, -target_snr_db / 20.0);

  // Bracket then bisect on sigma against the fixed normal draws; the noise
  // norm grows monotonically with sigma.
  double lo = 0.0;
  double hi = std::sqrt(signal_norm * signal_norm / static_cast<double>(clean.data().size()));
  for (int guard = 0; guard < 80 && noise_norm(clean, z1, z2, hi) < target_noise; ++guard) {
    hi *= 2.0;
  }
  double sigma = 0.5 * hi;
  for (int it = 0; it < 32; ++it) {
    sigma = 0.5 * (lo + hi);
    const double achieved = noise_norm(clean, z1, z2, sigma);
    if (achieved < target_noise) {
      lo = sigma;
    } else {
      hi = sigma;
    }
    if (it >= 11) {
      const double snr = 20.0 * std::log10(signal_norm / std::max(achieved, 1e-300));
      if (std::abs(snr - target_snr_db) <= 0.05) break;
    }
  }

  result.field = SignalField(clean.dims(), ch);
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < voxels; ++v) {
    for (int c = 0; c < ch; ++c) {
      const std::int64_t i = v * ch + c;
      result.field.data()[i] =
          std::hypot(clean.data()[i] + sigma * z1[i], sigma * z2[i]);
    }
  }
  result.sigma = sigma;
  result.achieved_snr_db = measure_snr(clean, result.field);
  return result;
}

double measure_snr(const SignalField& clean, const SignalField& noisy) {
  if (!clean.same_shape(noisy)) throw std::invalid_argument("measure_snr: shape mismatch");
  const int ch = clean.channels();
  const std::int64_t voxels = clean.voxel_count();
  std::vector<double> partial(static_cast<std::size_t>(voxels));
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < voxels; ++v) {
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) {
      const double d = clean.at(v, c) - noisy.at(v, c);
      acc += d * d;
    }
    partial[static_cast<std::size_t>(v)] = acc;
  }
  double err = 0.0;
  for (double p : partial) err += p;
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(l2_norm(clean) / std::sqrt(err));
}

}  // namespace hardi
