#pragma once

#include "hardi/field.hpp"
#include "hardi/phantom.hpp"
#include "hardi/solver.hpp"

// Plain serial implementations of the OpenMP kernels, kept as the reference
// the parallel versions are tested (and benchmarked) against. Results must be
// bit-identical to the parallel paths.
namespace hardi::ref {

SignalField apply_A(const SensingMatrix& a, const CoefficientField& c);
CoefficientField apply_A_transpose(const SensingMatrix& a, const SignalField& s);
double l2_norm(const VectorField& f);
double l1_norm(const VectorField& f);
double tv_field(const SignalField& s);
SignalField sample_field(const Phantom& phantom, const std::vector<UnitDirection>& directions,
                         double b);
CoefficientField sparse_only_reconstruct(const SensingMatrix& a, const SignalField& s,
                                         const SolverParams& params);

}  // namespace hardi::ref
