#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hardi/field.hpp"
#include "hardi/sphere.hpp"

namespace hardi {

/// Per-voxel orientation distribution function sampled at tessellation
/// vertices. Values are clamped non-negative and normalized to unit sum;
/// voxels whose raw ODF was identically zero fall back to the uniform
/// distribution and are flagged.
struct OdfField {
  GridDims dims;
  int vertex_count = 0;
  std::vector<double> values;          // voxel-major, vertex index fastest
  std::vector<std::uint8_t> degenerate;

  const double* voxel(std::int64_t v) const { return values.data() + v * vertex_count; }
};

OdfField odf_from_coefficients(const CoefficientField& c, const Eigen::MatrixXd& frt_kernel,
                               const Tessellation& tess);

struct Mode {
  UnitDirection direction;
  double value = 0.0;
};

struct ModeSet {
  GridDims dims;
  std::vector<std::vector<Mode>> modes;  // per voxel, sorted by descending value

  std::vector<int> counts() const {
    std::vector<int> out(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) out[i] = static_cast<int>(modes[i].size());
    return out;
  }
};

/// Local ODF maxima found by steepest ascent on the tessellation adjacency,
/// merged over antipodal/nearby pairs and thresholded at rel_threshold times
/// the per-voxel value range above the minimum.
std::vector<Mode> find_modes_voxel(std::span<const double> odf, const Tessellation& tess,
                                   double rel_threshold, double merge_angle_deg);

ModeSet find_modes(const OdfField& odf, const Tessellation& tess, double rel_threshold = 0.25,
                   double merge_angle_deg = 15.0);

/// Angular error in degrees between axial directions (antipodally invariant).
double angular_error_deg(const UnitDirection& true_dir, const UnitDirection& est_dir);

/// Greedy nearest matching of true fibers to estimated modes per voxel;
/// unmatched true fibers contribute the worst-case 90 degrees. Returns the
/// mean error over all true fibers.
double match_and_average_error(const std::vector<std::vector<UnitDirection>>& truth,
                               const ModeSet& modes);

struct NmseResult {
  double value = 0.0;
  std::int64_t excluded_voxels = 0;  // reference voxels with zero norm
};

NmseResult nmse_detailed(const SignalField& reference, const SignalField& estimate);
double nmse(const SignalField& reference, const SignalField& estimate);

/// Percent mean relative fiber-count error, 100 * mean(|M - Mhat| / M).
double false_detection_rate(const std::vector<int>& truth_counts,
                            const std::vector<int>& estimated_counts);

}  // namespace hardi
