#include <cmath>

#include "doctest.h"
#include "hardi/dictionary.hpp"
#include "hardi/phantom.hpp"
#include "oracles.hpp"

using namespace hardi;

TEST_CASE("kappa scalar values") {
  RidgeletSpec spec;
  CHECK(kappa(spec, 0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kappa(spec, 0, 4.0) == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
  CHECK(kappa(spec, -1, 7.0) == 0.0);
  CHECK_THROWS_AS(kappa(spec, -2, 1.0), std::invalid_argument);
}

TEST_CASE("funk_radon_multiplier values") {
  CHECK(funk_radon_multiplier(0) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(funk_radon_multiplier(3) == 0.0);
  CHECK(funk_radon_multiplier(1) == 0.0);
  CHECK(funk_radon_multiplier(2) == doctest::Approx(-kPi).epsilon(1e-14));
  CHECK(funk_radon_multiplier(4) == doctest::Approx(2.0 * kPi * 3.0 / 8.0).epsilon(1e-14));
  CHECK(funk_radon_multiplier(4) == doctest::Approx(2.3562).epsilon(1e-4));
}

TEST_CASE("funk_radon_multiplier equals 2*pi*P_n(0) up to degree 40") {
  for (int n = 0; n <= 40; ++n) {
    CHECK(std::abs(funk_radon_multiplier(n) - 2.0 * kPi * legendre(n, 0.0)) <= 1e-10);
  }
}

TEST_CASE("ridgelet_degree_profile closed form") {
  RidgeletSpec spec;
  const auto coarse = ridgelet_degree_profile(spec, -1);
  REQUIRE(!coarse.empty());
  CHECK(coarse[0] == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-14));

  for (int j = -1; j <= spec.max_resolution; ++j) {
    const auto profile = ridgelet_degree_profile(spec, j);
    CHECK(static_cast<int>(profile.size()) <= 51);  // n_max <= 50 for defaults
    for (std::size_t n = 1; n < profile.size(); n += 2) {
      CHECK(profile[n] == 0.0);  // odd degrees vanish
    }
    // every retained even coefficient matches the closed form
    for (std::size_t n = 0; n < profile.size(); n += 2) {
      const double expect = (1.0 / (2.0 * kPi)) * ((2.0 * n + 1.0) / (4.0 * kPi)) *
                            funk_radon_multiplier(static_cast<int>(n)) *
                            (kappa(spec, j + 1, static_cast<double>(n)) -
                             kappa(spec, j, static_cast<double>(n)));
      CHECK(profile[n] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("ridgelet dictionary counts") {
  const Dictionary dict = build_ridgelet_dictionary();
  CHECK(dict.atom_count() == 234);
  CHECK(dict.level_count(-1) == 16);
  CHECK(dict.level_count(0) == 49);
  CHECK(dict.level_count(1) == 169);

  RidgeletSpec low;
  low.max_resolution = -1;
  CHECK(build_ridgelet_dictionary(low).atom_count() == 16);

  RidgeletSpec small;
  small.max_resolution = 0;
  small.orientation_base = 1;
  CHECK(build_ridgelet_dictionary(small).atom_count() == 13);  // 4 + 9
}

TEST_CASE("advisory orientation-base rule lands at 5 for the defaults") {
  // The bandwidth rule contradicts both the stated m0 and the published
  // counts; it stays exposed but advisory.
  CHECK(suggested_orientation_base(RidgeletSpec{}) == 5);
}

TEST_CASE("dictionary construction is deterministic") {
  const Dictionary a = build_ridgelet_dictionary();
  const Dictionary b = build_ridgelet_dictionary();
  REQUIRE(a.atom_count() == b.atom_count());
  for (int m = 0; m < a.atom_count(); ++m) {
    CHECK(a.atoms[m].orientation.x == b.atoms[m].orientation.x);
    CHECK(a.atoms[m].level == b.atoms[m].level);
  }
  REQUIRE(a.degree_profiles.size() == b.degree_profiles.size());
  for (std::size_t i = 0; i < a.degree_profiles.size(); ++i) {
    CHECK(a.degree_profiles[i] == b.degree_profiles[i]);
  }
}

TEST_CASE("sh dictionary counts and validation") {
  CHECK(build_sh_dictionary(8).atom_count() == 45);
  CHECK(build_sh_dictionary(0).atom_count() == 1);
  CHECK(build_sh_dictionary(4).atom_count() == 15);
  CHECK_THROWS_AS(build_sh_dictionary(3), std::invalid_argument);
  CHECK_THROWS_AS(build_sh_dictionary(-2), std::invalid_argument);
}

TEST_CASE("sh degree-0 atom is constant") {
  const Dictionary dict = build_sh_dictionary(0);
  oracles::Rng rng(7);
  const double c0 = dict.evaluate(0, {0, 0, 1});
  CHECK(c0 == doctest::Approx(std::sqrt(1.0 / (4.0 * kPi))).epsilon(1e-12));
  for (int i = 0; i < 10; ++i) {
    CHECK(dict.evaluate(0, rng.direction()) == doctest::Approx(c0).epsilon(1e-12));
  }
}

TEST_CASE("sh atoms are orthonormal under dense quadrature") {
  // Lebedev-free check: random-point Monte Carlo would be noisy, so use the
  // 642-vertex tessellation with equal weights as an approximate quadrature
  // and only require loose orthogonality.
  const Dictionary dict = build_sh_dictionary(4);
  const Tessellation tess = icosphere(3);
  const double w = 4.0 * kPi / tess.vertex_count();
  for (int a = 0; a < dict.atom_count(); a += 3) {
    for (int b = a; b < dict.atom_count(); b += 4) {
      double acc = 0.0;
      for (const auto& v : tess.vertices) {
        acc += dict.evaluate(a, v) * dict.evaluate(b, v);
      }
      acc *= w;
      CHECK(acc == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(0.02));
    }
  }
}

TEST_CASE("gaussian dictionary counts and kernel values") {
  const Eigen::Vector3d diag(1700e-6, 300e-6, 300e-6);
  const Eigen::Matrix3d d0 = diag.asDiagonal();
  const Dictionary dict = build_gaussian_dictionary(253, 1000.0, d0);
  CHECK(dict.atom_count() == 253);

  // at its own orientation the kernel sees the axial diffusivity
  for (int m : {0, 50, 252}) {
    const UnitDirection v = dict.atoms[m].orientation;
    CHECK(dict.evaluate(m, v) == doctest::Approx(std::exp(-1.7)).epsilon(1e-9));
  }

  CHECK(fractional_anisotropy(d0) == doctest::Approx(0.80).epsilon(0.007));
  CHECK(mean_diffusivity(d0) == doctest::Approx(766.67e-6).epsilon(1e-3));

  Eigen::Matrix3d bad = d0;
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(build_gaussian_dictionary(4, 1000.0, bad), std::invalid_argument);
  Eigen::Matrix3d asym = d0;
  asym(0, 1) = 1e-3;
  CHECK_THROWS_AS(build_gaussian_dictionary(4, 1000.0, asym), std::invalid_argument);
}

TEST_CASE("sensing matrix shape and antipodal symmetry") {
  const Dictionary dict = build_ridgelet_dictionary();
  const auto dirs = spiral_hemisphere(16);
  const SensingMatrix a = assemble_sensing_matrix(dict, dirs);
  CHECK(a.rows() == 16);
  CHECK(a.cols() == 234);

  oracles::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const UnitDirection u = rng.direction();
    const int m = rng.integer(0, dict.atom_count() - 1);
    CHECK(std::abs(dict.evaluate(m, u) - dict.evaluate(m, -u)) <= 1e-10);
  }

  CHECK_THROWS_AS(assemble_sensing_matrix(dict, {}), std::invalid_argument);
}

TEST_CASE("finest-level ridgelet atoms peak on their great circle") {
  const Dictionary dict = build_ridgelet_dictionary();
  // pick a level-1 atom and scan a dense set of polar angles around its axis
  int m1 = -1;
  for (int m = 0; m < dict.atom_count(); ++m) {
    if (dict.atoms[m].level == 1) {
      m1 = m;
      break;
    }
  }
  REQUIRE(m1 >= 0);
  const auto& profile = dict.degree_profiles[dict.atoms[m1].profile];
  double best_dot = 2.0, best_val = -1e300;
  for (int i = 0; i <= 20000; ++i) {
    const double dot = -1.0 + 2.0 * i / 20000.0;
    const double val = legendre_expansion(profile, dot);
    if (val > best_val) {
      best_val = val;
      best_dot = dot;
    }
  }
  CHECK(std::abs(best_dot) <= 1e-3);  // maximum lies on u.v = 0
}

TEST_CASE("frt kernel matches great-circle quadrature on random atoms") {
  const Dictionary dict = build_ridgelet_dictionary();
  const Tessellation tess = icosphere(1);
  const Eigen::MatrixXd q = frt_kernel_matrix(dict, tess);
  oracles::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = rng.integer(0, dict.atom_count() - 1);
    const int i = rng.integer(0, tess.vertex_count() - 1);
    const double quad = oracles::great_circle_quadrature(dict, m, tess.vertices[i]);
    const double rel = std::abs(q(i, m) - quad) / std::max(std::abs(quad), 1e-12);
    CHECK(rel <= 1e-6);
  }
}

TEST_CASE("frt on spherical harmonics: degree multipliers") {
  const Dictionary dict = build_sh_dictionary(8);
  const Tessellation tess = icosphere(1);
  const Eigen::MatrixXd q = frt_kernel_matrix(dict, tess);
  // degree-0 atom is multiplied by lambda_0 = 2*pi
  for (int i = 0; i < tess.vertex_count(); ++i) {
    CHECK(q(i, 0) ==
          doctest::Approx(2.0 * kPi * dict.evaluate(0, tess.vertices[i])).epsilon(1e-12));
  }
  // degree-l atoms are scaled by lambda_l everywhere
  oracles::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = rng.integer(0, dict.atom_count() - 1);
    const int i = rng.integer(0, tess.vertex_count() - 1);
    const double lam = funk_radon_multiplier(dict.atoms[m].level);
    CHECK(q(i, m) == doctest::Approx(lam * dict.evaluate(m, tess.vertices[i]))
                         .epsilon(1e-10));
  }
}

TEST_CASE("frt kernel rejects gaussian dictionaries") {
  const Eigen::Vector3d diag(1700e-6, 300e-6, 300e-6);
  const Dictionary dict = build_gaussian_dictionary(16, 1000.0, diag.asDiagonal());
  CHECK_THROWS(frt_kernel_matrix(dict, icosphere(0)));
}
