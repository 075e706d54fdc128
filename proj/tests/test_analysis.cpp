#include <cmath>

#include "doctest.h"
#include "hardi/analysis.hpp"
#include "hardi/phantom.hpp"
#include "hardi/solver.hpp"
#include "oracles.hpp"

using namespace hardi;

namespace {

// Dense-fit ODF of a synthetic voxel: least-squares coefficients from the
// 642-direction signal, pushed through the Funk-Radon kernel.
struct DenseOdf {
  Tessellation tess;
  Eigen::MatrixXd kernel;
  Dictionary dict;
  SensingMatrix a642;

  DenseOdf()
      : tess(icosphere(3)),
        dict(build_ridgelet_dictionary()),
        a642(assemble_sensing_matrix(dict, tess.vertices)) {
    kernel = frt_kernel_matrix(dict, tess);
  }

  OdfField odf_of(const VoxelModel& vm, double b) const {
    Eigen::VectorXd s(tess.vertex_count());
    for (int i = 0; i < tess.vertex_count(); ++i) {
      s(i) = synth_signal(vm, b, tess.vertices[i]);
    }
    const Eigen::VectorXd c = oracles::dense_fit(a642, s);
    CoefficientField cf({1, 1, 1}, static_cast<int>(c.size()));
    for (int m = 0; m < c.size(); ++m) cf.at(0, m) = c(m);
    return odf_from_coefficients(cf, kernel, tess);
  }
};

VoxelModel voxel_with_axes(const std::vector<UnitDirection>& axes) {
  VoxelModel vm;
  for (const auto& axis : axes) {
    FiberComponent fc;
    fc.weight = 1.0 / axes.size();
    fc.tensor = axisymmetric_tensor(1700e-6, 300e-6, axis);
    fc.principal_direction = axis;
    vm.components.push_back(fc);
  }
  return vm;
}

}  // namespace

TEST_CASE("odf normalization and degenerate fallback") {
  const Tessellation tess = icosphere(1);
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Identity(tess.vertex_count(), tess.vertex_count());

  CoefficientField c({2, 1, 1}, tess.vertex_count());
  c.at(0, 3) = 2.0;
  c.at(0, 7) = -5.0;  // negative raw values are clamped
  // voxel 1 stays all-zero
  const OdfField odf = odf_from_coefficients(c, kernel, tess);

  double sum0 = 0.0;
  for (int i = 0; i < tess.vertex_count(); ++i) {
    CHECK(odf.voxel(0)[i] >= 0.0);
    sum0 += odf.voxel(0)[i];
  }
  CHECK(sum0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(odf.degenerate[0] == 0);

  CHECK(odf.degenerate[1] == 1);
  for (int i = 0; i < tess.vertex_count(); ++i) {
    CHECK(odf.voxel(1)[i] == doctest::Approx(1.0 / tess.vertex_count()));
  }
}

TEST_CASE("isotropic voxel gives a flat ODF") {
  DenseOdf oracle;
  VoxelModel vm;
  FiberComponent fc;
  fc.weight = 1.0;
  fc.tensor = 766.67e-6 * Eigen::Matrix3d::Identity();
  fc.principal_direction = {0, 0, 1};
  vm.components.push_back(fc);

  const OdfField odf = oracle.odf_of(vm, 3000.0);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < odf.vertex_count; ++i) {
    lo = std::min(lo, odf.voxel(0)[i]);
    hi = std::max(hi, odf.voxel(0)[i]);
  }
  const double mean = 1.0 / odf.vertex_count;
  CHECK((hi - lo) / mean <= 1e-3);

  // and no modes survive on a flat ODF
  const auto modes =
      find_modes_voxel(std::span<const double>(odf.voxel(0), odf.vertex_count), oracle.tess,
                       0.4, 15.0);
  CHECK(modes.empty());
}

TEST_CASE("single-tensor ODF peaks along the principal axis") {
  DenseOdf oracle;
  oracles::Rng rng(1);
  for (int trial = 0; trial < 3; ++trial) {
    const UnitDirection axis = rng.direction();
    const OdfField odf = oracle.odf_of(voxel_with_axes({axis}), 3000.0);

    int argmax = 0;
    for (int i = 0; i < odf.vertex_count; ++i) {
      if (odf.voxel(0)[i] > odf.voxel(0)[argmax]) argmax = i;
    }
    CHECK(axial_angle_deg(oracle.tess.vertices[argmax], axis) <= 5.0);

    const auto modes = find_modes_voxel(
        std::span<const double>(odf.voxel(0), odf.vertex_count), oracle.tess, 0.4, 15.0);
    REQUIRE(modes.size() == 1);
    CHECK(axial_angle_deg(modes[0].direction, axis) <= 5.0);
  }
}

TEST_CASE("two orthogonal tensors give two orthogonal modes") {
  DenseOdf oracle;
  const OdfField odf =
      oracle.odf_of(voxel_with_axes({{1, 0, 0}, {0, 1, 0}}), 3000.0);
  const auto modes = find_modes_voxel(
      std::span<const double>(odf.voxel(0), odf.vertex_count), oracle.tess, 0.4, 15.0);
  REQUIRE(modes.size() == 2);
  const double sep = axial_angle_deg(modes[0].direction, modes[1].direction);
  CHECK(sep >= 80.0);
  CHECK(sep <= 100.0);
}

TEST_CASE("find_modes count is invariant under positive affine rescaling") {
  DenseOdf oracle;
  const OdfField odf =
      oracle.odf_of(voxel_with_axes({{1, 0, 0}, {0, 0, 1}}), 3000.0);
  std::vector<double> raw(odf.voxel(0), odf.voxel(0) + odf.vertex_count);
  std::vector<double> scaled(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) scaled[i] = 3.5 * raw[i] + 0.25;
  const auto m1 = find_modes_voxel(raw, oracle.tess, 0.4, 15.0);
  const auto m2 = find_modes_voxel(scaled, oracle.tess, 0.4, 15.0);
  CHECK(m1.size() == m2.size());
}

TEST_CASE("angular_error properties") {
  CHECK(angular_error_deg({1, 0, 0}, {1, 0, 0}) == doctest::Approx(0.0));
  CHECK(angular_error_deg({1, 0, 0}, {0, 1, 0}) == doctest::Approx(90.0));
  const UnitDirection a{1, 0, 0};
  const UnitDirection b = UnitDirection::normalized(0.5, std::sqrt(0.75), 0.0);
  CHECK(angular_error_deg(a, b) == doctest::Approx(60.0).epsilon(1e-9));

  oracles::Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const UnitDirection u = rng.direction(), v = rng.direction();
    CHECK(angular_error_deg(u, v) == doctest::Approx(angular_error_deg(v, u)));
    CHECK(angular_error_deg(u, v) == doctest::Approx(angular_error_deg(-u, v)));
    CHECK(angular_error_deg(u, v) == doctest::Approx(angular_error_deg(u, -v)));
  }
}

TEST_CASE("match_and_average_error conventions") {
  ModeSet modes;
  modes.dims = {1, 1, 1};

  // perfect single match
  modes.modes = {{{UnitDirection{1, 0, 0}, 1.0}}};
  CHECK(match_and_average_error({{UnitDirection{1, 0, 0}}}, modes) == doctest::Approx(0.0));

  // no modes at all: every fiber contributes the 90-degree penalty
  modes.modes = {{}};
  CHECK(match_and_average_error({{UnitDirection{1, 0, 0}}}, modes) == doctest::Approx(90.0));

  // nearest-unused matching: one fiber, two candidate modes at 5 and 40 degrees
  const double r5 = 5.0 * kPi / 180.0, r40 = 40.0 * kPi / 180.0;
  modes.modes = {{
      {UnitDirection::normalized(std::cos(r40), std::sin(r40), 0.0), 0.9},
      {UnitDirection::normalized(std::cos(r5), std::sin(r5), 0.0), 1.0},
  }};
  CHECK(match_and_average_error({{UnitDirection{1, 0, 0}}}, modes) ==
        doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("nmse arithmetic") {
  oracles::Rng rng(3);
  const SignalField ref = oracles::random_field(rng, {3, 3, 1}, 4);

  CHECK(nmse(ref, ref) == 0.0);

  SignalField zero(ref.dims(), ref.channels());
  CHECK(nmse(ref, zero) == doctest::Approx(1.0).epsilon(1e-12));

  SignalField twice = ref;
  for (double& x : twice.data()) x *= 2.0;
  CHECK(nmse(ref, twice) == doctest::Approx(1.0).epsilon(1e-12));

  // zero reference voxels are excluded with a count adjustment
  SignalField ref2 = ref;
  for (int c = 0; c < ref2.channels(); ++c) ref2.at(0, c) = 0.0;
  SignalField est2 = ref2;
  const NmseResult detail = nmse_detailed(ref2, est2);
  CHECK(detail.excluded_voxels == 1);
  CHECK(detail.value == 0.0);
}

TEST_CASE("nmse zero iff equal") {
  oracles::Rng rng(4);
  const SignalField ref = oracles::random_field(rng, {2, 2, 1}, 3);
  SignalField est = ref;
  est.at(2, 1) += 1e-9;
  CHECK(nmse(ref, est) > 0.0);
}

TEST_CASE("false_detection_rate") {
  CHECK(false_detection_rate({1, 2, 3}, {1, 2, 3}) == doctest::Approx(0.0));
  CHECK(false_detection_rate({2, 2}, {1, 1}) == doctest::Approx(50.0));
  CHECK(false_detection_rate({1}, {3}) == doctest::Approx(200.0));
  CHECK_THROWS_AS(false_detection_rate({0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(false_detection_rate({1, 1}, {1}), std::invalid_argument);
}
