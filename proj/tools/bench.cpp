// Timing comparison between the OpenMP kernels and their serial reference
// implementations on a phantom-sized workload.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hardi/experiment.hpp"
#include "hardi/reference.hpp"

using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    f();
    const auto stop = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return best;
}

void report(const std::string& name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.2f ms   omp %9.2f ms   speedup %.2fx\n", name.c_str(),
              serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 3;
  if (argc > 1) reps = std::atoi(argv[1]);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#endif

  const hardi::Phantom phantom = hardi::make_phantom2();
  const auto dirs = hardi::spiral_hemisphere(16);
  const hardi::Dictionary dict = hardi::build_ridgelet_dictionary();
  const hardi::SensingMatrix a = hardi::assemble_sensing_matrix(dict, dirs);
  const hardi::SignalField clean = hardi::sample_field(phantom, dirs, 3000.0);
  const hardi::NoiseResult noisy = hardi::add_rician_noise(clean, 18.0, 1);

  hardi::SolverParams params;

  report("sample_field",
         time_ms([&] { (void)hardi::ref::sample_field(phantom, dirs, 3000.0); }, reps),
         time_ms([&] { (void)hardi::sample_field(phantom, dirs, 3000.0); }, reps));

  const hardi::CoefficientField coeffs =
      hardi::sparse_only_reconstruct(a, noisy.field, params);
  report("apply_A",
         time_ms([&] { (void)hardi::ref::apply_A(a, coeffs); }, reps * 10),
         time_ms([&] { (void)hardi::apply_A(a, coeffs); }, reps * 10));
  report("apply_A_transpose",
         time_ms([&] { (void)hardi::ref::apply_A_transpose(a, noisy.field); }, reps * 10),
         time_ms([&] { (void)hardi::apply_A_transpose(a, noisy.field); }, reps * 10));
  report("l2_norm",
         time_ms([&] { (void)hardi::ref::l2_norm(coeffs); }, reps * 10),
         time_ms([&] { (void)hardi::l2_norm(coeffs); }, reps * 10));
  report("tv_field",
         time_ms([&] { (void)hardi::ref::tv_field(noisy.field); }, reps * 10),
         time_ms([&] { (void)hardi::tv_field(noisy.field); }, reps * 10));
  report("sparse_only_reconstruct",
         time_ms([&] { (void)hardi::ref::sparse_only_reconstruct(a, noisy.field, params); },
                 reps),
         time_ms([&] { (void)hardi::sparse_only_reconstruct(a, noisy.field, params); }, reps));

  hardi::SolverParams bregman = params;
  bregman.max_bregman_iters = 5;
  report("split_bregman (5 cycles)",
         time_ms(
             [&] {
#ifdef _OPENMP
               const int saved = omp_get_max_threads();
               omp_set_num_threads(1);
               (void)hardi::split_bregman_reconstruct(a, noisy.field, bregman);
               omp_set_num_threads(saved);
#else
               (void)hardi::split_bregman_reconstruct(a, noisy.field, bregman);
#endif
             },
             1),
         time_ms([&] { (void)hardi::split_bregman_reconstruct(a, noisy.field, bregman); }, 1));
  return 0;
}
