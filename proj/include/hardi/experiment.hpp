#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardi/analysis.hpp"
#include "hardi/phantom.hpp"
#include "hardi/solver.hpp"

namespace hardi {

struct AnalysisParams {
  double rel_threshold = 0.25;
  double merge_angle_deg = 15.0;
};

enum class ReconMode { SparseOnly, SparseTv };

std::string to_string(ReconMode mode);
ReconMode recon_mode_from_string(const std::string& name);

Phantom make_phantom_by_name(const std::string& name);

/// The default comparator kernel tensor diag(1700, 300, 300) * 1e-6 mm^2/s
/// (mean diffusivity 766e-6, fractional anisotropy 0.8).
Eigen::Matrix3d default_kernel_tensor();

/// Dictionary for an experiment cell: "rdg" (234 ridgelets), "sh8" (45 real
/// symmetric harmonics), or "gss" (253 rotated Gaussian kernels at the given
/// b-value).
Dictionary build_dictionary_by_kind(const std::string& kind, double b);

/// Greedy max-min-angle selection of a quasi-uniform subset; returns indices
/// into `directions`.
std::vector<int> select_subset(const std::vector<UnitDirection>& directions, int count);

/// One reconstruction experiment: synthesize, contaminate, reconstruct, and
/// score against the 642-vertex reference.
struct ExperimentCell {
  std::string phantom = "phantom1";
  double b = 3000.0;
  int k = 16;
  double snr_db = 18.0;  // +inf means noise-free
  std::string dict = "rdg";
  ReconMode mode = ReconMode::SparseTv;
  std::uint64_t seed = 1;
};

struct CellResult {
  bool ok = false;
  std::string error;
  double achieved_snr_db = 0.0;
  double nmse = 0.0;
  double delta_deg = 0.0;  // NaN when the dictionary has no Funk-Radon kernel
  double pd_pct = 0.0;     // NaN likewise
  int bregman_iterations = 0;
};

CellResult run_cell(const ExperimentCell& cell, const SolverParams& params,
                    const AnalysisParams& analysis);

struct ExperimentConfig {
  std::vector<std::string> phantoms;
  std::vector<double> b_values;
  std::vector<int> k_values;
  std::vector<double> snr_values_db;
  std::vector<std::string> dicts;
  std::vector<ReconMode> modes;
  std::vector<std::uint64_t> seeds;
  SolverParams params;
  AnalysisParams analysis;
  std::string out_dir;

  void validate() const;
  std::vector<ExperimentCell> cells() const;  // full cross product, fixed order
};

ExperimentConfig experiment_config_from_json_text(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct SweepOutcome {
  int total_cells = 0;
  int failed_cells = 0;
};

/// Runs every cell, writes results.csv (per seed) and results_agg.csv
/// (mean/std over seeds) under config.out_dir. Cell failures are recorded in
/// the status column and do not stop the sweep.
SweepOutcome run_sweep(const ExperimentConfig& config);

}  // namespace hardi
