#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <vector>

#include "hardi/field.hpp"

namespace hardi {

struct SolverParams {
  double lambda = 0.03;        // l1 weight
  double mu = 0.05;            // TV weight
  double gamma = 0.5;          // Bregman coupling
  int max_bregman_iters = 20;
  int inner_fista_iters = 200;
  int inner_tv_iters = 100;
  double rel_change_tol = 1e-4;
  double fista_tol = 1e-6;     // inner relative objective tolerance

  void validate() const;
};

/// sign(t) * max(|t| - tau, 0)
inline double soft_threshold(double t, double tau) {
  if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau must be >= 0");
  if (t > tau) return t - tau;
  if (t < -tau) return t + tau;
  return 0.0;
}

/// Spectral norm of A A^T estimated by power iteration (1e-6 relative).
/// FISTA step sizes use nu = 1.01 * this.
double operator_norm(const SensingMatrix& a);

/// Preallocated scratch for repeated per-voxel FISTA solves.
struct FistaWorkspace {
  Eigen::VectorXd c, c_prev, y, residual, gradient;
};

/// Approximate minimizer of 0.5*||A c - s||^2 + lambda*||c||_1 by FISTA
/// (no momentum restarts), step 1/nu, stopping when the relative objective
/// change drops below tol. Pass `warm` to start from a previous solution.
Eigen::VectorXd fista_voxel(const Eigen::MatrixXd& a, const Eigen::VectorXd& s,
                            double lambda, int max_iters, double nu, double tol,
                            const Eigen::VectorXd* warm = nullptr,
                            FistaWorkspace* workspace = nullptr);

/// Convenience overload matching the per-operation signature: computes nu
/// from the spectral norm internally.
Eigen::VectorXd fista_voxel(const SensingMatrix& a, const Eigen::VectorXd& s,
                            double lambda, int max_iters);

/// Voxel-independent sparse coding of the whole field (the CS-only path).
CoefficientField sparse_only_reconstruct(const SensingMatrix& a, const SignalField& s,
                                         const SolverParams& params);

/// Approximate minimizer of 0.5*||u - image||_F^2 + weight*||u||_TV with the
/// causal-clique TV, via Chambolle's dual projection iteration (dual step
/// 1/8). weight = 0 returns the input.
std::vector<double> tv_denoise(std::span<const double> image, GridDims dims, double weight,
                               int max_iters);

struct SplitBregmanState {
  CoefficientField c;
  SignalField u;  // auxiliary smoothed field
  SignalField b;  // running Bregman residual
  int iterations = 0;
  std::vector<double> objective_trace;    // full objective at c per cycle
  std::vector<double> feasibility_trace;  // ||A{c} - u|| per cycle
};

class DivergedError : public std::runtime_error {
 public:
  DivergedError(int iteration, const std::string& what)
      : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

/// Split-Bregman/ADMM coordinator: alternates per-voxel sparse coding,
/// per-channel TV denoising, and the Bregman residual update, one pass of
/// each per cycle. Stops when the relative l2 change of c falls below
/// params.rel_change_tol or after max_bregman_iters cycles. Throws
/// DivergedError if non-finite values appear.
SplitBregmanState split_bregman_reconstruct(const SensingMatrix& a, const SignalField& s,
                                            const SolverParams& params);

}  // namespace hardi
