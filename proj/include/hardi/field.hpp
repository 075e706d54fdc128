#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hardi/dictionary.hpp"
#include "hardi/types.hpp"

namespace hardi {

/// Dense vector field over the voxel lattice: one fixed-length channel vector
/// per voxel, stored voxel-major (channel index fastest).
class VectorField {
 public:
  VectorField() = default;
  VectorField(GridDims dims, int channels)
      : dims_(dims),
        channels_(channels),
        data_(static_cast<std::size_t>(dims.voxel_count()) * channels, 0.0) {
    if (channels < 1) throw std::invalid_argument("VectorField: channels must be >= 1");
    if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1) {
      throw std::invalid_argument("VectorField: dims must be >= 1");
    }
  }

  const GridDims& dims() const { return dims_; }
  int channels() const { return channels_; }
  std::int64_t voxel_count() const { return dims_.voxel_count(); }

  double* voxel(std::int64_t v) { return data_.data() + v * channels_; }
  const double* voxel(std::int64_t v) const { return data_.data() + v * channels_; }
  double& at(std::int64_t v, int c) { return data_[v * channels_ + c]; }
  double at(std::int64_t v, int c) const { return data_[v * channels_ + c]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const VectorField& o) const {
    return dims_ == o.dims_ && channels_ == o.channels_;
  }

 private:
  GridDims dims_{};
  int channels_ = 1;
  std::vector<double> data_;
};

using SignalField = VectorField;       // channels = K measured directions
using CoefficientField = VectorField;  // channels = M dictionary atoms

/// s(r) = A c(r) at every voxel.
SignalField apply_A(const SensingMatrix& a, const CoefficientField& c);

/// c(r) = A^T s(r) at every voxel (adjoint of apply_A).
CoefficientField apply_A_transpose(const SensingMatrix& a, const SignalField& s);

double l2_norm(const VectorField& f);
double l1_norm(const VectorField& f);
double inner_product(const VectorField& a, const VectorField& b);

/// Total variation of a scalar image with the causal 3-neighbour clique
/// (left/front/below differences); out-of-grid neighbours are omitted.
double tv_image(std::span<const double> image, GridDims dims);

/// Sum of per-channel image total variations.
double tv_field(const SignalField& s);

std::vector<double> extract_channel(const VectorField& f, int channel);
void insert_channel(VectorField& f, int channel, std::span<const double> values);

/// Sparse view of a coefficient field: (voxel, channel, value) triplets for
/// the nonzero entries. Worth switching to once most entries are exact zeros.
struct SparseEntry {
  std::int64_t voxel;
  int channel;
  double value;
};

double zero_fraction(const VectorField& f);
std::vector<SparseEntry> to_sparse(const VectorField& f);
VectorField from_sparse(GridDims dims, int channels, const std::vector<SparseEntry>& entries);

}  // namespace hardi
