#include "hardi/dictionary.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace hardi {

void RidgeletSpec::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("RidgeletSpec: rho must be positive and finite");
  }
  if (max_resolution < -1) {
    throw std::invalid_argument("RidgeletSpec: max_resolution must be >= -1");
  }
  if (orientation_base < 1) {
    throw std::invalid_argument("RidgeletSpec: orientation_base must be >= 1");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("RidgeletSpec: epsilon must be positive");
  }
  if (!(summand_tol > 0.0)) {
    throw std::invalid_argument("RidgeletSpec: summand_tol must be positive");
  }
}

std::string to_string(DictionaryKind kind) {
  switch (kind) {
    case DictionaryKind::Ridgelet: return "ridgelet";
    case DictionaryKind::SphericalHarmonic: return "spherical_harmonic";
    case DictionaryKind::Gaussian: return "gaussian";
  }
  return "unknown";
}

DictionaryKind dictionary_kind_from_string(const std::string& name) {
  if (name == "ridgelet" || name == "rdg") return DictionaryKind::Ridgelet;
  if (name == "spherical_harmonic" || name == "sh8" || name == "sh") {
    return DictionaryKind::SphericalHarmonic;
  }
  if (name == "gaussian" || name == "gss") return DictionaryKind::Gaussian;
  throw std::invalid_argument("unknown dictionary kind: " + name);
}

double kappa(const RidgeletSpec& spec, int j, double x) {
  if (j < -1) throw std::invalid_argument("kappa: j must be >= -1");
  if (j == -1) return 0.0;
  const double scaled = x / static_cast<double>(1 << j);
  return std::exp(-spec.rho * scaled * (scaled + 1.0));
}

double funk_radon_multiplier(int n) {
  if (n < 0) throw std::invalid_argument("funk_radon_multiplier: n must be >= 0");
  if (n % 2 == 1) return 0.0;
  double lam = 2.0 * kPi;
  for (int k = 2; k <= n; k += 2) {
    lam *= -static_cast<double>(k - 1) / k;
  }
  return lam;
}

std::vector<double> ridgelet_degree_profile(const RidgeletSpec& spec, int j) {
  spec.validate();
  if (j < -1 || j > spec.max_resolution) {
    throw std::invalid_argument("ridgelet_degree_profile: j out of [-1, J]");
  }

  // Only even degrees contribute (lambda_n vanishes for odd n). The series is
  // truncated at the first even n where the envelope (2n+1)/(4pi)*kappa_{j+1}(n)
  // has entered its decreasing tail and dropped below summand_tol; from there
  // on every summand magnitude stays below the threshold.
  constexpr int kMaxDegree = 2000;
  std::vector<double> coef;
  double lam = 2.0 * kPi;  // lambda_n tracked incrementally over even n
  double prev_env = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= kMaxDegree; n += 2) {
    if (n > 0) lam *= -static_cast<double>(n - 1) / n;
    const double diff = kappa(spec, j + 1, n) - kappa(spec, j, n);
    const double c =
        (1.0 / (2.0 * kPi)) * ((2.0 * n + 1.0) / (4.0 * kPi)) * lam * diff;
    coef.resize(n + 1, 0.0);
    coef[n] = c;
    const double env = (2.0 * n + 1.0) / (4.0 * kPi) * kappa(spec, j + 1, n);
    if (n >= 4 && env < spec.summand_tol && env < prev_env) break;
    prev_env = env;
  }
  return coef;
}

int ridgelet_orientation_count(const RidgeletSpec& spec, int j) {
  const double scale = std::pow(2.0, j + 1);
  const int base = static_cast<int>(std::lround(scale * spec.orientation_base + 1.0));
  return base * base;
}

int suggested_orientation_base(const RidgeletSpec& spec) {
  spec.validate();
  int m0 = 1;
  while (kappa(spec, 0, m0) > spec.epsilon) ++m0;
  return m0;
}

double zonal_l2_norm(const std::vector<double>& coef) {
  // ||sum_n a_n P_n(u.v)||^2 = sum_n a_n^2 * 4pi/(2n+1)
  double acc = 0.0;
  for (std::size_t n = 0; n < coef.size(); ++n) {
    acc += coef[n] * coef[n] * 4.0 * kPi / (2.0 * n + 1.0);
  }
  return std::sqrt(acc);
}

Dictionary build_ridgelet_dictionary(const RidgeletSpec& spec) {
  spec.validate();
  Dictionary dict;
  dict.kind = DictionaryKind::Ridgelet;
  for (int j = -1; j <= spec.max_resolution; ++j) {
    std::vector<double> profile = ridgelet_degree_profile(spec, j);
    // Atoms are normalized to unit L2 norm over the sphere so that the
    // l1 weight acts uniformly across resolution levels.
    const double norm = zonal_l2_norm(profile);
    for (double& c : profile) c /= norm;
    dict.degree_profiles.push_back(std::move(profile));
    const int profile_index = static_cast<int>(dict.degree_profiles.size()) - 1;

    const int mj = ridgelet_orientation_count(spec, j);
    for (const UnitDirection& v : spiral_hemisphere(mj)) {
      dict.atoms.push_back(Atom{j, 0, v, profile_index});
    }
  }
  return dict;
}

Dictionary build_sh_dictionary(int max_degree) {
  if (max_degree < 0 || max_degree % 2 != 0) {
    throw std::invalid_argument("build_sh_dictionary: max_degree must be even and >= 0");
  }
  Dictionary dict;
  dict.kind = DictionaryKind::SphericalHarmonic;
  for (int l = 0; l <= max_degree; l += 2) {
    for (int m = -l; m <= l; ++m) {
      dict.atoms.push_back(Atom{l, m, {0.0, 0.0, 1.0}, -1});
    }
  }
  return dict;
}

namespace {

Eigen::Matrix3d rotation_taking(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  // Rodrigues rotation mapping unit vector `from` onto unit vector `to`.
  const Eigen::Vector3d axis = from.cross(to);
  const double s = axis.norm();
  const double c = from.dot(to);
  if (s < 1e-14) {
    if (c > 0.0) return Eigen::Matrix3d::Identity();
    // Antipodal: rotate by pi around any axis orthogonal to `from`.
    Eigen::Vector3d ortho = from.unitOrthogonal();
    return 2.0 * ortho * ortho.transpose() - Eigen::Matrix3d::Identity();
  }
  Eigen::Matrix3d k;
  k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  return Eigen::Matrix3d::Identity() + k + k * k * ((1.0 - c) / (s * s));
}

}  // namespace

Dictionary build_gaussian_dictionary(int n_rotations, double b, const Eigen::Matrix3d& d0) {
  if (n_rotations < 1) {
    throw std::invalid_argument("build_gaussian_dictionary: n_rotations must be >= 1");
  }
  if (!d0.isApprox(d0.transpose(), 1e-10)) {
    throw std::invalid_argument("build_gaussian_dictionary: d0 must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(d0);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("build_gaussian_dictionary: d0 must be positive-definite");
  }
  const Eigen::Vector3d principal = eig.eigenvectors().col(2);  // largest eigenvalue

  Dictionary dict;
  dict.kind = DictionaryKind::Gaussian;
  dict.b_value = b;
  for (const UnitDirection& v : spiral_hemisphere(n_rotations)) {
    const Eigen::Vector3d target(v.x, v.y, v.z);
    const Eigen::Matrix3d r = rotation_taking(principal, target);
    dict.gaussian_tensors.push_back(r * d0 * r.transpose());
    dict.atoms.push_back(Atom{0, 0, v, -1});
  }
  return dict;
}

int Dictionary::level_count(int level) const {
  int count = 0;
  for (const Atom& a : atoms) {
    if (a.level == level) ++count;
  }
  return count;
}

double Dictionary::evaluate(int m, const UnitDirection& u) const {
  const Atom& atom = atoms.at(m);
  switch (kind) {
    case DictionaryKind::Ridgelet:
      return legendre_expansion(degree_profiles[atom.profile],
                                clamp_unit(u.dot(atom.orientation)));
    case DictionaryKind::SphericalHarmonic:
      return real_spherical_harmonic(atom.level, atom.order, u);
    case DictionaryKind::Gaussian: {
      const Eigen::Vector3d uv(u.x, u.y, u.z);
      return std::exp(-b_value * uv.dot(gaussian_tensors[m] * uv));
    }
  }
  throw std::logic_error("Dictionary::evaluate: unknown kind");
}

double Dictionary::frt_evaluate(int m, const UnitDirection& v) const {
  const Atom& atom = atoms.at(m);
  switch (kind) {
    case DictionaryKind::Ridgelet: {
      const std::vector<double>& profile = degree_profiles[atom.profile];
      std::vector<double> scaled(profile.size());
      for (std::size_t n = 0; n < profile.size(); ++n) {
        scaled[n] = profile[n] * funk_radon_multiplier(static_cast<int>(n));
      }
      return legendre_expansion(scaled, clamp_unit(v.dot(atom.orientation)));
    }
    case DictionaryKind::SphericalHarmonic:
      return funk_radon_multiplier(atom.level) *
             real_spherical_harmonic(atom.level, atom.order, v);
    case DictionaryKind::Gaussian:
      throw std::runtime_error(
          "frt_evaluate: unsupported for Gaussian dictionaries (no degree profile)");
  }
  throw std::logic_error("Dictionary::frt_evaluate: unknown kind");
}

double real_spherical_harmonic(int l, int m, const UnitDirection& u) {
  if (l < 0 || std::abs(m) > l) {
    throw std::invalid_argument("real_spherical_harmonic: need |m| <= l, l >= 0");
  }
  const int am = std::abs(m);
  const double ct = clamp_unit(u.z);                    // cos(theta)
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));  // sin(theta)

  // Associated Legendre P_l^{am}(ct) with Condon-Shortley phase, via the
  // standard diagonal-then-upward recurrence.
  double pmm = 1.0;
  for (int k = 1; k <= am; ++k) {
    pmm *= -(2.0 * k - 1.0) * st;
  }
  double plm;
  if (l == am) {
    plm = pmm;
  } else {
    double pmmp1 = (2.0 * am + 1.0) * ct * pmm;
    if (l == am + 1) {
      plm = pmmp1;
    } else {
      plm = 0.0;
      for (int k = am + 2; k <= l; ++k) {
        plm = ((2.0 * k - 1.0) * ct * pmmp1 - (k + am - 1.0) * pmm) / (k - am);
        pmm = pmmp1;
        pmmp1 = plm;
      }
    }
  }

  double norm = (2.0 * l + 1.0) / (4.0 * kPi);
  for (int k = l - am + 1; k <= l + am; ++k) norm /= k;  // (l-|m|)! / (l+|m|)!
  norm = std::sqrt(norm);

  const double phi = std::atan2(u.y, u.x);
  if (m == 0) return norm * plm;
  const double sqrt2 = std::sqrt(2.0);
  if (m > 0) return sqrt2 * norm * plm * std::cos(m * phi);
  return sqrt2 * norm * plm * std::sin(am * phi);
}

SensingMatrix assemble_sensing_matrix(const Dictionary& dict,
                                      const std::vector<UnitDirection>& directions) {
  if (directions.empty()) {
    throw std::invalid_argument("assemble_sensing_matrix: directions must be non-empty");
  }
  SensingMatrix sm;
  sm.kind = dict.kind;
  sm.directions = directions;
  sm.entries.resize(static_cast<Eigen::Index>(directions.size()), dict.atom_count());
  for (int m = 0; m < dict.atom_count(); ++m) {
    for (std::size_t k = 0; k < directions.size(); ++k) {
      sm.entries(static_cast<Eigen::Index>(k), m) = dict.evaluate(m, directions[k]);
    }
  }
  return sm;
}

Eigen::MatrixXd frt_kernel_matrix(const Dictionary& dict, const Tessellation& tess) {
  if (dict.kind == DictionaryKind::Gaussian) {
    throw std::runtime_error(
        "frt_kernel_matrix: unsupported for Gaussian dictionaries (no degree profile)");
  }
  Eigen::MatrixXd q(tess.vertex_count(), dict.atom_count());
  for (int m = 0; m < dict.atom_count(); ++m) {
    for (int i = 0; i < tess.vertex_count(); ++i) {
      q(i, m) = dict.frt_evaluate(m, tess.vertices[i]);
    }
  }
  return q;
}

}  // namespace hardi
