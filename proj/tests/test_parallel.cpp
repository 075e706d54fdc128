#include <omp.h>

#include "doctest.h"
#include "hardi/analysis.hpp"
#include "hardi/reference.hpp"
#include "oracles.hpp"

using namespace hardi;

namespace {

struct Fixture {
  Phantom phantom = make_phantom1();
  std::vector<UnitDirection> dirs = spiral_hemisphere(16);
  SensingMatrix a = assemble_sensing_matrix(build_ridgelet_dictionary(), dirs);
  SignalField clean = sample_field(phantom, dirs, 3000.0);
};

}  // namespace

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
  Fixture fx;
  oracles::Rng rng(1);

  const CoefficientField c = oracles::random_field(rng, fx.phantom.dims, fx.a.cols());
  const SignalField s = oracles::random_field(rng, fx.phantom.dims, fx.a.rows());

  CHECK(apply_A(fx.a, c).data() == ref::apply_A(fx.a, c).data());
  CHECK(apply_A_transpose(fx.a, s).data() == ref::apply_A_transpose(fx.a, s).data());
  CHECK(l2_norm(s) == ref::l2_norm(s));
  CHECK(l1_norm(c) == ref::l1_norm(c));
  CHECK(tv_field(s) == ref::tv_field(s));
  CHECK(sample_field(fx.phantom, fx.dirs, 3000.0).data() ==
        ref::sample_field(fx.phantom, fx.dirs, 3000.0).data());

  SolverParams params;
  params.inner_fista_iters = 60;
  const NoiseResult noisy = add_rician_noise(fx.clean, 18.0, 9);
  CHECK(sparse_only_reconstruct(fx.a, noisy.field, params).data() ==
        ref::sparse_only_reconstruct(fx.a, noisy.field, params).data());
}

TEST_CASE("results do not depend on the thread count") {
  Fixture fx;
  const int saved = omp_get_max_threads();

  SolverParams params;
  params.max_bregman_iters = 4;

  omp_set_num_threads(1);
  const NoiseResult noisy1 = add_rician_noise(fx.clean, 18.0, 4);
  const SplitBregmanState state1 = split_bregman_reconstruct(fx.a, noisy1.field, params);
  const double norm1 = l2_norm(state1.u);

  omp_set_num_threads(std::max(2, saved));
  const NoiseResult noisy2 = add_rician_noise(fx.clean, 18.0, 4);
  const SplitBregmanState state2 = split_bregman_reconstruct(fx.a, noisy2.field, params);
  const double norm2 = l2_norm(state2.u);

  omp_set_num_threads(saved);

  CHECK(noisy1.field.data() == noisy2.field.data());
  CHECK(noisy1.sigma == noisy2.sigma);
  CHECK(state1.c.data() == state2.c.data());
  CHECK(state1.u.data() == state2.u.data());
  CHECK(state1.b.data() == state2.b.data());
  CHECK(norm1 == norm2);
  CHECK(state1.objective_trace == state2.objective_trace);
}
