#include "hardi/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hardi {

namespace {

using nlohmann::json;

constexpr char kFieldMagic[8] = {'H', 'R', 'D', 'I', 'F', 'L', 'D', '1'};
constexpr char kMatrixMagic[8] = {'H', 'R', 'D', 'I', 'M', 'T', 'X', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  // Little-endian regardless of host.
  char buf[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(buf, 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) |
         (static_cast<std::uint32_t>(buf[3]) << 24);
}

void write_doubles(std::ostream& out, const double* data, std::size_t count) {
  static_assert(sizeof(double) == 8);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
}

void read_doubles(std::istream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8));
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

json direction_to_json(const UnitDirection& d) { return json::array({d.x, d.y, d.z}); }

UnitDirection direction_from_json(const json& j) {
  return UnitDirection::normalized(j.at(0).get<double>(), j.at(1).get<double>(),
                                   j.at(2).get<double>());
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_field(const std::filesystem::path& path, const VectorField& field) {
  auto out = open_out(path, std::ios::binary);
  out.write(kFieldMagic, 8);
  write_u32(out, static_cast<std::uint32_t>(field.dims().nx));
  write_u32(out, static_cast<std::uint32_t>(field.dims().ny));
  write_u32(out, static_cast<std::uint32_t>(field.dims().nz));
  write_u32(out, static_cast<std::uint32_t>(field.channels()));
  write_doubles(out, field.data().data(), field.data().size());
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

VectorField read_field(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kFieldMagic, 8) != 0) {
    throw std::runtime_error("not a field file: " + path.string());
  }
  GridDims dims;
  dims.nx = static_cast<int>(read_u32(in));
  dims.ny = static_cast<int>(read_u32(in));
  dims.nz = static_cast<int>(read_u32(in));
  const int channels = static_cast<int>(read_u32(in));
  VectorField field(dims, channels);
  read_doubles(in, field.data().data(), field.data().size());
  if (!in) throw std::runtime_error("truncated field file: " + path.string());
  return field;
}

void write_field_csv(const std::filesystem::path& path, const VectorField& field) {
  auto out = open_out(path, std::ios::out);
  for (int x = 0; x < field.dims().nx; ++x) {
    for (int y = 0; y < field.dims().ny; ++y) {
      for (int z = 0; z < field.dims().nz; ++z) {
        out << x << ',' << y << ',' << z;
        const double* row = field.voxel(field.dims().index(x, y, z));
        for (int c = 0; c < field.channels(); ++c) out << ',' << format_double(row[c]);
        out << '\n';
      }
    }
  }
}

void write_sensing_matrix(const std::filesystem::path& path, const SensingMatrix& matrix) {
  auto out = open_out(path, std::ios::binary);
  out.write(kMatrixMagic, 8);
  write_u32(out, static_cast<std::uint32_t>(matrix.kind));
  write_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  write_u32(out, static_cast<std::uint32_t>(matrix.cols()));
  for (int k = 0; k < matrix.rows(); ++k) {
    for (int m = 0; m < matrix.cols(); ++m) {
      const double v = matrix.entries(k, m);
      write_doubles(out, &v, 1);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SensingMatrix read_sensing_matrix(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMatrixMagic, 8) != 0) {
    throw std::runtime_error("not a sensing matrix file: " + path.string());
  }
  SensingMatrix matrix;
  matrix.kind = static_cast<DictionaryKind>(read_u32(in));
  const int rows = static_cast<int>(read_u32(in));
  const int cols = static_cast<int>(read_u32(in));
  matrix.entries.resize(rows, cols);
  for (int k = 0; k < rows; ++k) {
    for (int m = 0; m < cols; ++m) {
      read_doubles(in, &matrix.entries(k, m), 1);
    }
  }
  if (!in) throw std::runtime_error("truncated sensing matrix file: " + path.string());
  return matrix;
}

void write_sensing_matrix_csv(const std::filesystem::path& path, const SensingMatrix& matrix) {
  auto out = open_out(path, std::ios::out);
  for (int k = 0; k < matrix.rows(); ++k) {
    for (int m = 0; m < matrix.cols(); ++m) {
      if (m) out << ',';
      out << format_double(matrix.entries(k, m));
    }
    out << '\n';
  }
}

void write_directions_csv(const std::filesystem::path& path,
                          const std::vector<UnitDirection>& directions) {
  auto out = open_out(path, std::ios::out);
  for (const UnitDirection& d : directions) {
    out << format_double(d.x) << ',' << format_double(d.y) << ',' << format_double(d.z)
        << '\n';
  }
}

std::vector<UnitDirection> read_directions_csv(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  std::vector<UnitDirection> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, y, z;
    char c1, c2;
    if (!(ss >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',') {
      throw std::runtime_error("bad direction row in " + path.string() + ": " + line);
    }
    // keep already-unit coordinates untouched so round trips are bit-exact
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (std::abs(norm - 1.0) <= 1e-12) {
      out.push_back(UnitDirection{x, y, z});
    } else {
      out.push_back(UnitDirection::normalized(x, y, z));
    }
  }
  if (out.empty()) throw std::runtime_error("no directions in " + path.string());
  return out;
}

void write_truth_json(const std::filesystem::path& path, const Phantom& phantom, double b) {
  json root;
  root["phantom"] = phantom.name;
  root["dims"] = {phantom.dims.nx, phantom.dims.ny, phantom.dims.nz};
  root["b"] = b;
  json voxels = json::array();
  for (int x = 0; x < phantom.dims.nx; ++x) {
    for (int y = 0; y < phantom.dims.ny; ++y) {
      for (int z = 0; z < phantom.dims.nz; ++z) {
        const VoxelModel& vm = phantom.voxels[phantom.dims.index(x, y, z)];
        json voxel;
        voxel["x"] = x;
        voxel["y"] = y;
        voxel["z"] = z;
        voxel["s0"] = vm.s0;
        json comps = json::array();
        for (const FiberComponent& fc : vm.components) {
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(fc.tensor);
          json comp;
          comp["weight"] = fc.weight;
          comp["direction"] = direction_to_json(fc.principal_direction);
          // descending eigenvalues
          comp["eigenvalues"] = {eig.eigenvalues()(2), eig.eigenvalues()(1),
                                 eig.eigenvalues()(0)};
          comps.push_back(comp);
        }
        voxel["components"] = comps;
        voxels.push_back(voxel);
      }
    }
  }
  root["voxels"] = voxels;
  auto out = open_out(path, std::ios::out);
  out << root.dump(1) << '\n';
}

Phantom read_truth_json(const std::filesystem::path& path, double* b_out) {
  auto in = open_in(path, std::ios::in);
  json root = json::parse(in);
  Phantom phantom;
  phantom.name = root.at("phantom").get<std::string>();
  phantom.dims = {root.at("dims").at(0).get<int>(), root.at("dims").at(1).get<int>(),
                  root.at("dims").at(2).get<int>()};
  if (b_out) *b_out = root.at("b").get<double>();
  phantom.voxels.resize(phantom.dims.voxel_count());
  for (const json& voxel : root.at("voxels")) {
    const int x = voxel.at("x").get<int>();
    const int y = voxel.at("y").get<int>();
    const int z = voxel.at("z").get<int>();
    VoxelModel& vm = phantom.voxels[phantom.dims.index(x, y, z)];
    vm.s0 = voxel.at("s0").get<double>();
    for (const json& comp : voxel.at("components")) {
      FiberComponent fc;
      fc.weight = comp.at("weight").get<double>();
      fc.principal_direction = direction_from_json(comp.at("direction"));
      const double axial = comp.at("eigenvalues").at(0).get<double>();
      const double radial = comp.at("eigenvalues").at(1).get<double>();
      fc.tensor = axisymmetric_tensor(axial, radial, fc.principal_direction);
      vm.components.push_back(fc);
    }
  }
  return phantom;
}

void write_modes_json(const std::filesystem::path& path, const ModeSet& modes) {
  json root;
  root["dims"] = {modes.dims.nx, modes.dims.ny, modes.dims.nz};
  json voxels = json::array();
  for (const auto& voxel_modes : modes.modes) {
    json arr = json::array();
    for (const Mode& m : voxel_modes) {
      arr.push_back({{"direction", direction_to_json(m.direction)}, {"value", m.value}});
    }
    voxels.push_back(arr);
  }
  root["modes"] = voxels;
  auto out = open_out(path, std::ios::out);
  out << root.dump(1) << '\n';
}

ModeSet read_modes_json(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  json root = json::parse(in);
  ModeSet set;
  set.dims = {root.at("dims").at(0).get<int>(), root.at("dims").at(1).get<int>(),
              root.at("dims").at(2).get<int>()};
  for (const json& voxel : root.at("modes")) {
    std::vector<Mode> modes;
    for (const json& m : voxel) {
      modes.push_back({direction_from_json(m.at("direction")), m.at("value").get<double>()});
    }
    set.modes.push_back(std::move(modes));
  }
  return set;
}

SolverParams solver_params_from_json_text(const std::string& text) {
  json j = json::parse(text);
  SolverParams p;
  if (j.contains("lambda")) p.lambda = j["lambda"].get<double>();
  if (j.contains("mu")) p.mu = j["mu"].get<double>();
  if (j.contains("gamma")) p.gamma = j["gamma"].get<double>();
  if (j.contains("max_bregman_iters")) p.max_bregman_iters = j["max_bregman_iters"].get<int>();
  if (j.contains("inner_fista_iters")) p.inner_fista_iters = j["inner_fista_iters"].get<int>();
  if (j.contains("inner_tv_iters")) p.inner_tv_iters = j["inner_tv_iters"].get<int>();
  if (j.contains("rel_change_tol")) p.rel_change_tol = j["rel_change_tol"].get<double>();
  if (j.contains("fista_tol")) p.fista_tol = j["fista_tol"].get<double>();
  p.validate();
  return p;
}

SolverParams read_solver_params_json(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return solver_params_from_json_text(ss.str());
}

std::string solver_params_to_json(const SolverParams& params) {
  json j;
  j["lambda"] = params.lambda;
  j["mu"] = params.mu;
  j["gamma"] = params.gamma;
  j["max_bregman_iters"] = params.max_bregman_iters;
  j["inner_fista_iters"] = params.inner_fista_iters;
  j["inner_tv_iters"] = params.inner_tv_iters;
  j["rel_change_tol"] = params.rel_change_tol;
  j["fista_tol"] = params.fista_tol;
  return j.dump(1);
}

}  // namespace hardi
