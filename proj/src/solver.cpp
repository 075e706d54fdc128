#include "hardi/solver.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hardi {

void SolverParams::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("SolverParams: lambda must be >= 0");
  if (mu < 0.0) throw std::invalid_argument("SolverParams: mu must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("SolverParams: gamma must be > 0");
  if (max_bregman_iters < 1 || inner_fista_iters < 1 || inner_tv_iters < 1) {
    throw std::invalid_argument("SolverParams: iteration budgets must be >= 1");
  }
  if (!(rel_change_tol > 0.0) || !(fista_tol > 0.0)) {
    throw std::invalid_argument("SolverParams: tolerances must be > 0");
  }
}

double operator_norm(const SensingMatrix& a) {
  const Eigen::MatrixXd gram = a.entries * a.entries.transpose();
  const int k = static_cast<int>(gram.rows());
  // Deterministic start with a small ramp so it is not orthogonal to the
  // leading eigenvector of structured matrices.
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v(i) = 1.0 + 1e-3 * i;
  v.normalize();
  double eig = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = w.dot(gram * w);
    const bool converged = std::abs(next - eig) <= 1e-6 * std::max(next, 1e-30);
    eig = next;
    v = w;
    if (converged && it > 2) break;
  }
  return eig;
}

namespace {

double lasso_objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& s,
                       const Eigen::VectorXd& c, double lambda,
                       Eigen::VectorXd& residual) {
  residual.noalias() = a * c;
  residual -= s;
  return 0.5 * residual.squaredNorm() + lambda * c.lpNorm<1>();
}

}  // namespace

Eigen::VectorXd fista_voxel(const Eigen::MatrixXd& a, const Eigen::VectorXd& s,
                            double lambda, int max_iters, double nu, double tol,
                            const Eigen::VectorXd* warm, FistaWorkspace* workspace) {
  if (lambda < 0.0) throw std::invalid_argument("fista_voxel: lambda must be >= 0");
  if (!(nu > 0.0)) throw std::invalid_argument("fista_voxel: nu must be > 0");
  const Eigen::Index m = a.cols();

  FistaWorkspace local;
  FistaWorkspace& ws = workspace ? *workspace : local;
  ws.c = warm ? *warm : Eigen::VectorXd::Zero(m);
  ws.c_prev = ws.c;
  ws.y = ws.c;
  ws.residual.resize(a.rows());
  ws.gradient.resize(m);

  const double threshold = lambda / nu;
  double t = 1.0;
  double f_prev = lasso_objective(a, s, ws.c, lambda, ws.residual);
  for (int it = 0; it < max_iters; ++it) {
    ws.residual.noalias() = a * ws.y;
    ws.residual -= s;
    ws.gradient.noalias() = a.transpose() * ws.residual;
    for (Eigen::Index i = 0; i < m; ++i) {
      ws.c(i) = soft_threshold(ws.y(i) - ws.gradient(i) / nu, threshold);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    ws.y = ws.c + momentum * (ws.c - ws.c_prev);
    ws.c_prev = ws.c;
    t = t_next;

    const double f = lasso_objective(a, s, ws.c, lambda, ws.residual);
    if (std::abs(f_prev - f) <= tol * std::max(std::abs(f_prev), 1e-300)) break;
    f_prev = f;
  }
  return ws.c;
}

Eigen::VectorXd fista_voxel(const SensingMatrix& a, const Eigen::VectorXd& s,
                            double lambda, int max_iters) {
  const double nu = 1.01 * operator_norm(a);
  return fista_voxel(a.entries, s, lambda, max_iters, nu, 1e-10);
}

CoefficientField sparse_only_reconstruct(const SensingMatrix& a, const SignalField& s,
                                         const SolverParams& params) {
  params.validate();
  if (s.channels() != a.rows()) {
    throw std::invalid_argument("sparse_only_reconstruct: channel/direction mismatch");
  }
  const double nu = 1.01 * operator_norm(a);
  CoefficientField c(s.dims(), a.cols());
  const std::int64_t n = s.voxel_count();
#pragma omp parallel
  {
    FistaWorkspace ws;
    Eigen::VectorXd sv(a.rows());
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t v = 0; v < n; ++v) {
      sv = Eigen::Map<const Eigen::VectorXd>(s.voxel(v), a.rows());
      const Eigen::VectorXd cv = fista_voxel(a.entries, sv, params.lambda,
                                             params.inner_fista_iters, nu,
                                             params.fista_tol, nullptr, &ws);
      Eigen::Map<Eigen::VectorXd>(c.voxel(v), a.cols()) = cv;
    }
  }
  return c;
}

std::vector<double> tv_denoise(std::span<const double> image, GridDims dims, double weight,
                               int max_iters) {
  if (weight < 0.0) throw std::invalid_argument("tv_denoise: weight must be >= 0");
  if (static_cast<std::int64_t>(image.size()) != dims.voxel_count()) {
    throw std::invalid_argument("tv_denoise: size does not match dims");
  }
  std::vector<double> out(image.begin(), image.end());
  if (weight == 0.0) return out;

  const std::size_t n = image.size();
  const bool ax = dims.nx > 1, ay = dims.ny > 1, az = dims.nz > 1;
  constexpr double tau = 0.125;  // safe dual step for up to three difference axes

  // Dual variables pair with the backward differences u(r) - u(r - e_axis);
  // the slot is unused (kept at zero) where the neighbour falls outside.
  std::vector<double> px(ax ? n : 0, 0.0), py(ay ? n : 0, 0.0), pz(az ? n : 0, 0.0);
  std::vector<double> dtp(n), ex(ax ? n : 0), ey(ay ? n : 0), ez(az ? n : 0);

  auto idx = [&dims](int x, int y, int z) { return dims.index(x, y, z); };

  for (int it = 0; it < max_iters; ++it) {
    // dtp = D^T p
    std::fill(dtp.begin(), dtp.end(), 0.0);
    for (int x = 0; x < dims.nx; ++x) {
      for (int y = 0; y < dims.ny; ++y) {
        for (int z = 0; z < dims.nz; ++z) {
          const auto i = idx(x, y, z);
          if (ax && x > 0) {
            dtp[i] += px[i];
            dtp[idx(x - 1, y, z)] -= px[i];
          }
          if (ay && y > 0) {
            dtp[i] += py[i];
            dtp[idx(x, y - 1, z)] -= py[i];
          }
          if (az && z > 0) {
            dtp[i] += pz[i];
            dtp[idx(x, y, z - 1)] -= pz[i];
          }
        }
      }
    }
    // eta = D(dtp - g/weight); joint normalization over the clique of each voxel
    double max_step = 0.0;
    for (int x = 0; x < dims.nx; ++x) {
      for (int y = 0; y < dims.ny; ++y) {
        for (int z = 0; z < dims.nz; ++z) {
          const auto i = idx(x, y, z);
          const double here = dtp[i] - image[i] / weight;
          double gx = 0.0, gy = 0.0, gz = 0.0;
          if (ax && x > 0) gx = here - (dtp[idx(x - 1, y, z)] - image[idx(x - 1, y, z)] / weight);
          if (ay && y > 0) gy = here - (dtp[idx(x, y - 1, z)] - image[idx(x, y - 1, z)] / weight);
          if (az && z > 0) gz = here - (dtp[idx(x, y, z - 1)] - image[idx(x, y, z - 1)] / weight);
          const double mag = std::sqrt(gx * gx + gy * gy + gz * gz);
          const double scale = 1.0 / (1.0 + tau * mag);
          if (ax && x > 0) {
            const double next = (px[i] - tau * gx) * scale;
            max_step = std::max(max_step, std::abs(next - px[i]));
            ex[i] = next;
          }
          if (ay && y > 0) {
            const double next = (py[i] - tau * gy) * scale;
            max_step = std::max(max_step, std::abs(next - py[i]));
            ey[i] = next;
          }
          if (az && z > 0) {
            const double next = (pz[i] - tau * gz) * scale;
            max_step = std::max(max_step, std::abs(next - pz[i]));
            ez[i] = next;
          }
        }
      }
    }
    if (ax) px.swap(ex);
    if (ay) py.swap(ey);
    if (az) pz.swap(ez);
    if (max_step < 1e-12) break;
  }

  // u = g - weight * D^T p
  std::fill(dtp.begin(), dtp.end(), 0.0);
  for (int x = 0; x < dims.nx; ++x) {
    for (int y = 0; y < dims.ny; ++y) {
      for (int z = 0; z < dims.nz; ++z) {
        const auto i = idx(x, y, z);
        if (ax && x > 0) {
          dtp[i] += px[i];
          dtp[idx(x - 1, y, z)] -= px[i];
        }
        if (ay && y > 0) {
          dtp[i] += py[i];
          dtp[idx(x, y - 1, z)] -= py[i];
        }
        if (az && z > 0) {
          dtp[i] += pz[i];
          dtp[idx(x, y, z - 1)] -= pz[i];
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = image[i] - weight * dtp[i];
  return out;
}

SplitBregmanState split_bregman_reconstruct(const SensingMatrix& a, const SignalField& s,
                                            const SolverParams& params) {
  params.validate();
  if (s.channels() != a.rows()) {
    throw std::invalid_argument("split_bregman_reconstruct: channel/direction mismatch");
  }

  const double nu = 1.01 * operator_norm(a);
  const double step1_lambda = params.lambda / params.gamma;
  const double tv_weight = params.mu / (1.0 + params.gamma);
  const std::int64_t n = s.voxel_count();
  const int k = a.rows();

  SplitBregmanState state;
  state.c = CoefficientField(s.dims(), a.cols());
  state.u = s;
  state.b = SignalField(s.dims(), k);

  SignalField ac(s.dims(), k);
  SignalField d(s.dims(), k);
  CoefficientField c_prev = state.c;
  const double lasso_tol = params.fista_tol;

  for (int iter = 1; iter <= params.max_bregman_iters; ++iter) {
    // Step 1: per-voxel sparse coding against d = u - b, warm-started from
    // the previous cycle.
#pragma omp parallel
    {
      FistaWorkspace ws;
      Eigen::VectorXd dv(k), warm(a.cols());
#pragma omp for schedule(dynamic, 4)
      for (std::int64_t v = 0; v < n; ++v) {
        for (int c = 0; c < k; ++c) dv(c) = state.u.at(v, c) - state.b.at(v, c);
        warm = Eigen::Map<const Eigen::VectorXd>(state.c.voxel(v), a.cols());
        const Eigen::VectorXd cv =
            fista_voxel(a.entries, dv, step1_lambda, params.inner_fista_iters, nu,
                        lasso_tol, &warm, &ws);
        Eigen::Map<Eigen::VectorXd>(state.c.voxel(v), a.cols()) = cv;
      }
    }
    ac = apply_A(a, state.c);
    for (double x : ac.data()) {
      if (!std::isfinite(x)) {
        throw DivergedError(iter, "split_bregman_reconstruct: non-finite values at iteration " +
                                      std::to_string(iter));
      }
    }

    // Step 2: per-channel TV denoising of the combined quadratic target.
#pragma omp parallel for schedule(static)
    for (std::int64_t v = 0; v < n; ++v) {
      for (int c = 0; c < k; ++c) {
        d.at(v, c) = (s.at(v, c) + params.gamma * (ac.at(v, c) + state.b.at(v, c))) /
                     (1.0 + params.gamma);
      }
    }
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < k; ++c) {
      const std::vector<double> channel = extract_channel(d, c);
      const std::vector<double> denoised =
          tv_denoise(channel, s.dims(), tv_weight, params.inner_tv_iters);
      insert_channel(state.u, c, denoised);
    }

    // Bregman residual update.
#pragma omp parallel for schedule(static)
    for (std::int64_t v = 0; v < n; ++v) {
      for (int c = 0; c < k; ++c) {
        state.b.at(v, c) += ac.at(v, c) - state.u.at(v, c);
      }
    }

    state.iterations = iter;
    double gap_sq = 0.0, diff_sq = 0.0, prev_sq = 0.0;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ac.data().size()); ++i) {
      const double g = ac.data()[i] - state.u.data()[i];
      gap_sq += g * g;
    }
    for (std::size_t i = 0; i < state.c.data().size(); ++i) {
      const double dd = state.c.data()[i] - c_prev.data()[i];
      diff_sq += dd * dd;
      prev_sq += c_prev.data()[i] * c_prev.data()[i];
    }
    state.feasibility_trace.push_back(std::sqrt(gap_sq));

    double objective = 0.0;
    for (std::size_t i = 0; i < ac.data().size(); ++i) {
      const double r = ac.data()[i] - s.data()[i];
      objective += 0.5 * r * r;
    }
    objective += params.lambda * l1_norm(state.c) + params.mu * tv_field(ac);
    state.objective_trace.push_back(objective);

    c_prev = state.c;
    const double rel = std::sqrt(diff_sq) / std::max(std::sqrt(prev_sq), 1e-300);
    if (iter > 1 && rel < params.rel_change_tol) break;
  }
  return state;
}

}  // namespace hardi
