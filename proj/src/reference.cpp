#include "hardi/reference.hpp"

#include <cmath>

namespace hardi::ref {

SignalField apply_A(const SensingMatrix& a, const CoefficientField& c) {
  if (c.channels() != a.cols()) {
    throw std::invalid_argument("apply_A: coefficient channels != sensing matrix columns");
  }
  SignalField s(c.dims(), a.rows());
  for (std::int64_t v = 0; v < c.voxel_count(); ++v) {
    Eigen::Map<const Eigen::VectorXd> cv(c.voxel(v), a.cols());
    Eigen::Map<Eigen::VectorXd> sv(s.voxel(v), a.rows());
    sv.noalias() = a.entries * cv;
  }
  return s;
}

CoefficientField apply_A_transpose(const SensingMatrix& a, const SignalField& s) {
  if (s.channels() != a.rows()) {
    throw std::invalid_argument("apply_A_transpose: signal channels != sensing matrix rows");
  }
  CoefficientField c(s.dims(), a.cols());
  for (std::int64_t v = 0; v < s.voxel_count(); ++v) {
    Eigen::Map<const Eigen::VectorXd> sv(s.voxel(v), a.rows());
    Eigen::Map<Eigen::VectorXd> cv(c.voxel(v), a.cols());
    cv.noalias() = a.entries.transpose() * sv;
  }
  return c;
}

double l2_norm(const VectorField& f) {
  // Same per-voxel grouping as the parallel reduction so sums agree exactly.
  double acc = 0.0;
  for (std::int64_t v = 0; v < f.voxel_count(); ++v) {
    const double* p = f.voxel(v);
    double part = 0.0;
    for (int c = 0; c < f.channels(); ++c) part += p[c] * p[c];
    acc += part;
  }
  return std::sqrt(acc);
}

double l1_norm(const VectorField& f) {
  double acc = 0.0;
  for (std::int64_t v = 0; v < f.voxel_count(); ++v) {
    const double* p = f.voxel(v);
    double part = 0.0;
    for (int c = 0; c < f.channels(); ++c) part += std::abs(p[c]);
    acc += part;
  }
  return acc;
}

double tv_field(const SignalField& s) {
  double acc = 0.0;
  for (int k = 0; k < s.channels(); ++k) {
    acc += tv_image(extract_channel(s, k), s.dims());
  }
  return acc;
}

SignalField sample_field(const Phantom& phantom, const std::vector<UnitDirection>& directions,
                         double b) {
  SignalField s(phantom.dims, static_cast<int>(directions.size()));
  for (std::int64_t v = 0; v < s.voxel_count(); ++v) {
    double* row = s.voxel(v);
    for (std::size_t k = 0; k < directions.size(); ++k) {
      row[k] = synth_signal(phantom.voxels[v], b, directions[k]);
    }
  }
  return s;
}

CoefficientField sparse_only_reconstruct(const SensingMatrix& a, const SignalField& s,
                                         const SolverParams& params) {
  params.validate();
  if (s.channels() != a.rows()) {
    throw std::invalid_argument("sparse_only_reconstruct: channel/direction mismatch");
  }
  const double nu = 1.01 * operator_norm(a);
  CoefficientField c(s.dims(), a.cols());
  FistaWorkspace ws;
  for (std::int64_t v = 0; v < s.voxel_count(); ++v) {
    Eigen::Map<const Eigen::VectorXd> sv(s.voxel(v), a.rows());
    const Eigen::VectorXd copy = sv;
    const Eigen::VectorXd cv = fista_voxel(a.entries, copy, params.lambda,
                                           params.inner_fista_iters, nu, params.fista_tol,
                                           nullptr, &ws);
    Eigen::Map<Eigen::VectorXd>(c.voxel(v), a.cols()) = cv;
  }
  return c;
}

}  // namespace hardi::ref
