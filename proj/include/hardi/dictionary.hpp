#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hardi/sphere.hpp"
#include "hardi/types.hpp"

namespace hardi {

/// Parameters of the spherical ridgelet frame.
///
/// orientation_base (m0) defaults to 3 so that the per-level orientation
/// counts come out as 16/49/169 (234 atoms in total). The bandwidth-cutoff
/// rule "smallest order with kappa_0(m0) <= epsilon" is advisory only; see
/// suggested_orientation_base().
struct RidgeletSpec {
  double rho = 0.5;          // scaling parameter of the generating Gaussian
  int max_resolution = 1;    // J; resolutions run j = -1 .. J
  int orientation_base = 3;  // m0
  double epsilon = 1e-6;     // cutoff used by the advisory m0 rule
  double summand_tol = 1e-9; // series truncation threshold

  void validate() const;
};

enum class DictionaryKind { Ridgelet, SphericalHarmonic, Gaussian };

std::string to_string(DictionaryKind kind);
DictionaryKind dictionary_kind_from_string(const std::string& name);

struct Atom {
  int level = 0;              // ridgelet resolution j, or SH degree l
  int order = 0;              // SH order m; unused for the other kinds
  UnitDirection orientation;  // ridgelet / gaussian orientation
  int profile = -1;           // index into Dictionary::degree_profiles
};

/// An atom family with a uniform evaluation interface. Ridgelet and
/// spherical-harmonic atoms carry Legendre degree information so that the
/// Funk-Radon transform can be applied analytically; Gaussian atoms are
/// evaluated directly from their rotated tensors and do not support it.
class Dictionary {
 public:
  DictionaryKind kind = DictionaryKind::Ridgelet;
  std::vector<Atom> atoms;
  // Zonal Legendre coefficient profiles shared between atoms (indexed by
  // Atom::profile). Entry n multiplies P_n(u . v).
  std::vector<std::vector<double>> degree_profiles;
  // Gaussian kind only.
  double b_value = 0.0;
  std::vector<Eigen::Matrix3d> gaussian_tensors;

  int atom_count() const { return static_cast<int>(atoms.size()); }
  int level_count(int level) const;

  double evaluate(int m, const UnitDirection& u) const;
  /// Value of the Funk-Radon transform of atom m at v. Throws for the
  /// Gaussian kind, which has no closed-form degree profile.
  double frt_evaluate(int m, const UnitDirection& v) const;
};

/// Dyadically scaled generating function kappa_j(x); j = -1 is identically 0.
double kappa(const RidgeletSpec& spec, int j, double x);

/// Funk-Radon eigenvalue lambda_n = 2*pi*P_n(0): zero for odd n, alternating
/// ratio of double factorials for even n.
double funk_radon_multiplier(int n);

/// Zonal Legendre coefficients of the resolution-j ridgelet,
/// c_n = (1/2pi) * ((2n+1)/4pi) * lambda_n * (kappa_{j+1}(n) - kappa_j(n)),
/// truncated once the even-degree envelope stays below spec.summand_tol.
std::vector<double> ridgelet_degree_profile(const RidgeletSpec& spec, int j);

/// Orientation count M_j = (2^{j+1} * m0 + 1)^2 at resolution j.
int ridgelet_orientation_count(const RidgeletSpec& spec, int j);

/// Advisory rule for m0: smallest order with kappa_0(m0) <= spec.epsilon.
int suggested_orientation_base(const RidgeletSpec& spec);

/// L2 norm over the sphere of a zonal expansion sum_n coef[n] P_n(u . v).
double zonal_l2_norm(const std::vector<double>& coef);

Dictionary build_ridgelet_dictionary(const RidgeletSpec& spec = {});

/// Real symmetric spherical-harmonic basis with even degrees 0..max_degree;
/// (max_degree+1)(max_degree+2)/2 atoms.
Dictionary build_sh_dictionary(int max_degree);

/// Rotated Gaussian kernels exp{-b u^T (R D0 R^T) u} with the principal axis
/// of d0 aligned to spiral_hemisphere(n_rotations) directions.
Dictionary build_gaussian_dictionary(int n_rotations, double b, const Eigen::Matrix3d& d0);

/// Real symmetric spherical harmonic of even degree l and order m in [-l, l].
double real_spherical_harmonic(int l, int m, const UnitDirection& u);

struct SensingMatrix {
  Eigen::MatrixXd entries;  // K x M, entries(k, m) = atom_m(u_k)
  std::vector<UnitDirection> directions;
  DictionaryKind kind = DictionaryKind::Ridgelet;

  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
};

SensingMatrix assemble_sensing_matrix(const Dictionary& dict,
                                      const std::vector<UnitDirection>& directions);

/// V x M matrix mapping coefficients to Funk-Radon transform values at the
/// tessellation vertices (the Tuch ODF kernel).
Eigen::MatrixXd frt_kernel_matrix(const Dictionary& dict, const Tessellation& tess);

}  // namespace hardi
