#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hardi/field.hpp"
#include "hardi/types.hpp"

namespace hardi {

using Tensor = Eigen::Matrix3d;  // symmetric positive-definite, mm^2/s

/// Axially symmetric tensor with the given axial/radial diffusivities,
/// principal axis along `axis`.
Tensor axisymmetric_tensor(double axial, double radial, const UnitDirection& axis);

double fractional_anisotropy(const Tensor& d);
double mean_diffusivity(const Tensor& d);

struct FiberComponent {
  double weight = 1.0;
  Tensor tensor = Tensor::Identity();
  UnitDirection principal_direction;
};

struct VoxelModel {
  std::vector<FiberComponent> components;  // weights sum to 1
  double s0 = 1.0;
};

struct Phantom {
  std::string name;
  GridDims dims;
  std::vector<VoxelModel> voxels;  // linear order per GridDims::index
  double default_b = 3000.0;

  const VoxelModel& voxel(int x, int y, int z) const {
    return voxels[dims.index(x, y, z)];
  }
  std::vector<int> component_counts() const;
  std::vector<std::vector<UnitDirection>> fiber_directions() const;
};

/// Multi-tensor signal s0 * sum_i alpha_i * exp(-b u^T D_i u).
double synth_signal(const VoxelModel& model, double b, const UnitDirection& u);

/// 12x12 grid: horizontal band (rows 5-6) and vertical band (columns 5-6)
/// crossing at the right angle in the centre, plus a through-plane component
/// in every voxel. Component counts run 1 to 3.
Phantom make_phantom1();

/// 16x16 grid: the phantom-1 layout recentred (rows/columns 7-8) plus a
/// circular fiber of radius 6 whose direction is the local tangent.
Phantom make_phantom2();

/// Noise-free measurement of the phantom at the given directions.
SignalField sample_field(const Phantom& phantom, const std::vector<UnitDirection>& directions,
                         double b);

struct NoiseResult {
  SignalField field;
  double achieved_snr_db = 0.0;
  double sigma = 0.0;
};

/// Rician-contaminated copy of `clean`: each sample becomes
/// sqrt((s + n1)^2 + n2^2) with n1, n2 ~ N(0, sigma^2). Sigma is calibrated
/// by bisection so measure_snr(clean, noisy) lands within 0.5 dB of the
/// target. One RNG stream per voxel, derived from (seed, voxel index), so
/// results do not depend on scheduling. An infinite target returns the input.
NoiseResult add_rician_noise(const SignalField& clean, double target_snr_db,
                             std::uint64_t seed);

/// 20*log10(||clean|| / ||clean - noisy||); +infinity for identical fields.
double measure_snr(const SignalField& clean, const SignalField& noisy);

}  // namespace hardi
