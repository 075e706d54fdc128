#include "hardi/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace hardi {

OdfField odf_from_coefficients(const CoefficientField& c, const Eigen::MatrixXd& frt_kernel,
                               const Tessellation& tess) {
  if (frt_kernel.cols() != c.channels()) {
    throw std::invalid_argument("odf_from_coefficients: kernel columns != coefficient channels");
  }
  if (frt_kernel.rows() != tess.vertex_count()) {
    throw std::invalid_argument("odf_from_coefficients: kernel rows != tessellation vertices");
  }
  OdfField odf;
  odf.dims = c.dims();
  odf.vertex_count = tess.vertex_count();
  odf.values.resize(static_cast<std::size_t>(c.voxel_count()) * odf.vertex_count);
  odf.degenerate.assign(static_cast<std::size_t>(c.voxel_count()), 0);

  const std::int64_t n = c.voxel_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < n; ++v) {
    Eigen::Map<const Eigen::VectorXd> cv(c.voxel(v), c.channels());
    Eigen::Map<Eigen::VectorXd> raw(odf.values.data() + v * odf.vertex_count,
                                    odf.vertex_count);
    raw.noalias() = frt_kernel * cv;
    double sum = 0.0;
    for (int i = 0; i < odf.vertex_count; ++i) {
      if (raw(i) < 0.0) raw(i) = 0.0;
      sum += raw(i);
    }
    if (sum <= 0.0) {
      raw.setConstant(1.0 / odf.vertex_count);
      odf.degenerate[static_cast<std::size_t>(v)] = 1;
    } else {
      raw /= sum;
    }
  }
  return odf;
}

std::vector<Mode> find_modes_voxel(std::span<const double> odf, const Tessellation& tess,
                                   double rel_threshold, double merge_angle_deg) {
  if (!(rel_threshold > 0.0) || !(rel_threshold < 1.0)) {
    throw std::invalid_argument("find_modes_voxel: rel_threshold must be in (0, 1)");
  }
  const int nv = tess.vertex_count();
  if (static_cast<int>(odf.size()) != nv) {
    throw std::invalid_argument("find_modes_voxel: odf size != vertex count");
  }

  double lo = odf[0], hi = odf[0];
  for (double x : odf) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  // A flat ODF carries no orientation information.
  if (hi - lo <= 1e-12 * std::max(std::abs(hi), 1.0)) return {};

  // Steepest ascent from every vertex; each walk ends at a local maximum.
  std::vector<char> is_peak(nv, 0);
  for (int start = 0; start < nv; ++start) {
    int cur = start;
    for (;;) {
      int best = cur;
      double best_val = odf[cur];
      for (int nb : tess.neighbors[cur]) {
        if (odf[nb] > best_val) {
          best_val = odf[nb];
          best = nb;
        }
      }
      if (best == cur) break;
      cur = best;
    }
    is_peak[cur] = 1;
  }

  std::vector<int> peaks;
  for (int i = 0; i < nv; ++i) {
    if (is_peak[i] && odf[i] - lo > rel_threshold * (hi - lo)) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) {
    if (odf[a] != odf[b]) return odf[a] > odf[b];
    return a < b;
  });

  // Merge antipodal and near-duplicate maxima, keeping the higher one.
  std::vector<Mode> modes;
  for (int p : peaks) {
    const UnitDirection& dir = tess.vertices[p];
    bool merged = false;
    for (const Mode& m : modes) {
      if (axial_angle_deg(m.direction, dir) < merge_angle_deg) {
        merged = true;
        break;
      }
    }
    if (!merged) modes.push_back({dir, odf[p]});
  }
  return modes;
}

ModeSet find_modes(const OdfField& odf, const Tessellation& tess, double rel_threshold,
                   double merge_angle_deg) {
  ModeSet set;
  set.dims = odf.dims;
  const std::int64_t n = odf.dims.voxel_count();
  set.modes.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < n; ++v) {
    set.modes[static_cast<std::size_t>(v)] =
        find_modes_voxel(std::span<const double>(odf.voxel(v), odf.vertex_count), tess,
                         rel_threshold, merge_angle_deg);
  }
  return set;
}

double angular_error_deg(const UnitDirection& true_dir, const UnitDirection& est_dir) {
  return axial_angle_deg(true_dir, est_dir);
}

double match_and_average_error(const std::vector<std::vector<UnitDirection>>& truth,
                               const ModeSet& modes) {
  if (truth.size() != modes.modes.size()) {
    throw std::invalid_argument("match_and_average_error: voxel count mismatch");
  }
  double total = 0.0;
  std::int64_t fibers = 0;
  for (std::size_t v = 0; v < truth.size(); ++v) {
    const auto& dirs = truth[v];
    const auto& est = modes.modes[v];
    fibers += static_cast<std::int64_t>(dirs.size());
    if (dirs.empty()) continue;

    struct Pair {
      double err;
      int fiber;
      int mode;
    };
    std::vector<Pair> pairs;
    pairs.reserve(dirs.size() * est.size());
    for (std::size_t f = 0; f < dirs.size(); ++f) {
      for (std::size_t m = 0; m < est.size(); ++m) {
        pairs.push_back({angular_error_deg(dirs[f], est[m].direction), static_cast<int>(f),
                         static_cast<int>(m)});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.err != b.err) return a.err < b.err;
      if (a.fiber != b.fiber) return a.fiber < b.fiber;
      return a.mode < b.mode;
    });
    std::vector<char> fiber_used(dirs.size(), 0), mode_used(est.size(), 0);
    std::size_t matched = 0;
    for (const Pair& p : pairs) {
      if (fiber_used[p.fiber] || mode_used[p.mode]) continue;
      fiber_used[p.fiber] = 1;
      mode_used[p.mode] = 1;
      total += p.err;
      ++matched;
      if (matched == dirs.size()) break;
    }
    total += 90.0 * static_cast<double>(dirs.size() - matched);  // unmatched fibers
  }
  if (fibers == 0) return 0.0;
  return total / static_cast<double>(fibers);
}

NmseResult nmse_detailed(const SignalField& reference, const SignalField& estimate) {
  if (!reference.same_shape(estimate)) {
    throw std::invalid_argument("nmse: shape mismatch");
  }
  NmseResult result;
  double acc = 0.0;
  std::int64_t included = 0;
  for (std::int64_t v = 0; v < reference.voxel_count(); ++v) {
    double ref_sq = 0.0, err_sq = 0.0;
    for (int c = 0; c < reference.channels(); ++c) {
      const double r = reference.at(v, c);
      const double d = r - estimate.at(v, c);
      ref_sq += r * r;
      err_sq += d * d;
    }
    if (ref_sq == 0.0) {
      ++result.excluded_voxels;
      continue;
    }
    acc += err_sq / ref_sq;
    ++included;
  }
  result.value = included > 0 ? acc / static_cast<double>(included) : 0.0;
  return result;
}

double nmse(const SignalField& reference, const SignalField& estimate) {
  return nmse_detailed(reference, estimate).value;
}

double false_detection_rate(const std::vector<int>& truth_counts,
                            const std::vector<int>& estimated_counts) {
  if (truth_counts.size() != estimated_counts.size()) {
    throw std::invalid_argument("false_detection_rate: size mismatch");
  }
  if (truth_counts.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < truth_counts.size(); ++i) {
    if (truth_counts[i] < 1) {
      throw std::invalid_argument("false_detection_rate: truth counts must be >= 1");
    }
    acc += std::abs(truth_counts[i] - estimated_counts[i]) /
           static_cast<double>(truth_counts[i]);
  }
  return 100.0 * acc / static_cast<double>(truth_counts.size());
}

}  // namespace hardi
