#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hardi/analysis.hpp"
#include "hardi/dictionary.hpp"
#include "hardi/field.hpp"
#include "hardi/phantom.hpp"
#include "hardi/solver.hpp"

namespace hardi {

/// Round-tripping decimal formatting for doubles ("%.17g").
std::string format_double(double value);

// --- field binary format -----------------------------------------------
// 8-byte magic "HRDIFLD1", then little-endian u32 {nx, ny, nz, channels},
// then voxel-major (channel fastest) IEEE float64 payload.
void write_field(const std::filesystem::path& path, const VectorField& field);
VectorField read_field(const std::filesystem::path& path);

/// One voxel per row: x,y,z indices followed by the channel values.
void write_field_csv(const std::filesystem::path& path, const VectorField& field);

// --- sensing matrix binary format ---------------------------------------
// 8-byte magic "HRDIMTX1", little-endian u32 {kind, K, M}, then row-major
// IEEE float64 entries.
void write_sensing_matrix(const std::filesystem::path& path, const SensingMatrix& matrix);
SensingMatrix read_sensing_matrix(const std::filesystem::path& path);
void write_sensing_matrix_csv(const std::filesystem::path& path, const SensingMatrix& matrix);

// --- direction sets -------------------------------------------------------
/// One "x,y,z" row per direction.
void write_directions_csv(const std::filesystem::path& path,
                          const std::vector<UnitDirection>& directions);
std::vector<UnitDirection> read_directions_csv(const std::filesystem::path& path);

// --- phantom ground truth ---------------------------------------------------
/// JSON with grid dims, b-value, and per-voxel fiber weights, eigenvalues and
/// principal directions; enough to re-synthesize reference signals.
void write_truth_json(const std::filesystem::path& path, const Phantom& phantom, double b);
Phantom read_truth_json(const std::filesystem::path& path, double* b_out = nullptr);

// --- analysis outputs ---------------------------------------------------------
void write_modes_json(const std::filesystem::path& path, const ModeSet& modes);
ModeSet read_modes_json(const std::filesystem::path& path);

// --- solver params --------------------------------------------------------------
SolverParams solver_params_from_json_text(const std::string& text);
SolverParams read_solver_params_json(const std::filesystem::path& path);
std::string solver_params_to_json(const SolverParams& params);

}  // namespace hardi
