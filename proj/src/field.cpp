#include "hardi/field.hpp"

#include <cmath>

namespace hardi {

SignalField apply_A(const SensingMatrix& a, const CoefficientField& c) {
  if (c.channels() != a.cols()) {
    throw std::invalid_argument("apply_A: coefficient channels != sensing matrix columns");
  }
  SignalField s(c.dims(), a.rows());
  const std::int64_t n = c.voxel_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < n; ++v) {
    Eigen::Map<const Eigen::VectorXd> cv(c.voxel(v), a.cols());
    Eigen::Map<Eigen::VectorXd> sv(s.voxel(v), a.rows());
    sv.noalias() = a.entries * cv;
  }
  return s;
}

CoefficientField apply_A_transpose(const SensingMatrix& a, const SignalField& s) {
  if (s.channels() != a.rows()) {
    throw std::invalid_argument("apply_A_transpose: signal channels != sensing matrix rows");
  }
  CoefficientField c(s.dims(), a.cols());
  const std::int64_t n = s.voxel_count();
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < n; ++v) {
    Eigen::Map<const Eigen::VectorXd> sv(s.voxel(v), a.rows());
    Eigen::Map<Eigen::VectorXd> cv(c.voxel(v), a.cols());
    cv.noalias() = a.entries.transpose() * sv;
  }
  return c;
}

namespace {

// Reductions accumulate one partial per voxel and sum the partials in index
// order, so the result does not depend on the thread count.
template <typename PerVoxel>
double voxel_reduce(const VectorField& f, PerVoxel per_voxel) {
  const std::int64_t n = f.voxel_count();
  std::vector<double> partial(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::int64_t v = 0; v < n; ++v) {
    partial[static_cast<std::size_t>(v)] = per_voxel(v);
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

}  // namespace

double l2_norm(const VectorField& f) {
  const int ch = f.channels();
  return std::sqrt(voxel_reduce(f, [&](std::int64_t v) {
    const double* p = f.voxel(v);
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) acc += p[c] * p[c];
    return acc;
  }));
}

double l1_norm(const VectorField& f) {
  const int ch = f.channels();
  return voxel_reduce(f, [&](std::int64_t v) {
    const double* p = f.voxel(v);
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) acc += std::abs(p[c]);
    return acc;
  });
}

double inner_product(const VectorField& a, const VectorField& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("inner_product: shape mismatch");
  const int ch = a.channels();
  return voxel_reduce(a, [&](std::int64_t v) {
    const double* pa = a.voxel(v);
    const double* pb = b.voxel(v);
    double acc = 0.0;
    for (int c = 0; c < ch; ++c) acc += pa[c] * pb[c];
    return acc;
  });
}

double tv_image(std::span<const double> image, GridDims dims) {
  if (static_cast<std::int64_t>(image.size()) != dims.voxel_count()) {
    throw std::invalid_argument("tv_image: size does not match dims");
  }
  double acc = 0.0;
  for (int x = 0; x < dims.nx; ++x) {
    for (int y = 0; y < dims.ny; ++y) {
      for (int z = 0; z < dims.nz; ++z) {
        const double here = image[dims.index(x, y, z)];
        double sq = 0.0;
        if (x > 0) {
          const double d = here - image[dims.index(x - 1, y, z)];
          sq += d * d;
        }
        if (y > 0) {
          const double d = here - image[dims.index(x, y - 1, z)];
          sq += d * d;
        }
        if (z > 0) {
          const double d = here - image[dims.index(x, y, z - 1)];
          sq += d * d;
        }
        acc += std::sqrt(sq);
      }
    }
  }
  return acc;
}

double tv_field(const SignalField& s) {
  const int ch = s.channels();
  std::vector<double> partial(static_cast<std::size_t>(ch));
#pragma omp parallel for schedule(static)
  for (int k = 0; k < ch; ++k) {
    partial[static_cast<std::size_t>(k)] = tv_image(extract_channel(s, k), s.dims());
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

std::vector<double> extract_channel(const VectorField& f, int channel) {
  std::vector<double> out(static_cast<std::size_t>(f.voxel_count()));
  for (std::int64_t v = 0; v < f.voxel_count(); ++v) out[v] = f.at(v, channel);
  return out;
}

void insert_channel(VectorField& f, int channel, std::span<const double> values) {
  if (static_cast<std::int64_t>(values.size()) != f.voxel_count()) {
    throw std::invalid_argument("insert_channel: size does not match voxel count");
  }
  for (std::int64_t v = 0; v < f.voxel_count(); ++v) f.at(v, channel) = values[v];
}

double zero_fraction(const VectorField& f) {
  std::int64_t zeros = 0;
  for (double x : f.data()) {
    if (x == 0.0) ++zeros;
  }
  return static_cast<double>(zeros) / static_cast<double>(f.data().size());
}

std::vector<SparseEntry> to_sparse(const VectorField& f) {
  std::vector<SparseEntry> out;
  for (std::int64_t v = 0; v < f.voxel_count(); ++v) {
    for (int c = 0; c < f.channels(); ++c) {
      const double x = f.at(v, c);
      if (x != 0.0) out.push_back({v, c, x});
    }
  }
  return out;
}

VectorField from_sparse(GridDims dims, int channels, const std::vector<SparseEntry>& entries) {
  VectorField f(dims, channels);
  for (const SparseEntry& e : entries) f.at(e.voxel, e.channel) = e.value;
  return f;
}

}  // namespace hardi
