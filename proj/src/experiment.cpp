#include "hardi/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "hardi/io.hpp"
#include "json.hpp"

namespace hardi {

using nlohmann::json;

std::string to_string(ReconMode mode) {
  return mode == ReconMode::SparseOnly ? "cs" : "tv";
}

ReconMode recon_mode_from_string(const std::string& name) {
  if (name == "cs") return ReconMode::SparseOnly;
  if (name == "tv") return ReconMode::SparseTv;
  throw std::invalid_argument("unknown reconstruction mode: " + name);
}

Phantom make_phantom_by_name(const std::string& name) {
  if (name == "phantom1") return make_phantom1();
  if (name == "phantom2") return make_phantom2();
  throw std::invalid_argument("unknown phantom: " + name);
}

Eigen::Matrix3d default_kernel_tensor() {
  Eigen::Vector3d diag(1700e-6, 300e-6, 300e-6);
  return diag.asDiagonal();
}

Dictionary build_dictionary_by_kind(const std::string& kind, double b) {
  const DictionaryKind k = dictionary_kind_from_string(kind);
  switch (k) {
    case DictionaryKind::Ridgelet: return build_ridgelet_dictionary();
    case DictionaryKind::SphericalHarmonic: return build_sh_dictionary(8);
    case DictionaryKind::Gaussian: return build_gaussian_dictionary(253, b, default_kernel_tensor());
  }
  throw std::logic_error("unreachable");
}

std::vector<int> select_subset(const std::vector<UnitDirection>& directions, int count) {
  const int n = static_cast<int>(directions.size());
  if (count < 1 || count > n) {
    throw std::invalid_argument("select_subset: count out of range");
  }
  std::vector<int> chosen;
  // Start from the most polar direction, then repeatedly take the direction
  // maximizing the minimum axial angle to the chosen set.
  int first = 0;
  for (int i = 1; i < n; ++i) {
    if (directions[i].z > directions[first].z) first = i;
  }
  chosen.push_back(first);
  std::vector<char> used(n, 0);
  used[first] = 1;
  while (static_cast<int>(chosen.size()) < count) {
    int best = -1;
    double best_angle = -1.0;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      double min_angle = 1e300;
      for (int c : chosen) {
        min_angle = std::min(min_angle, axial_angle_deg(directions[i], directions[c]));
      }
      if (min_angle > best_angle) {
        best_angle = min_angle;
        best = i;
      }
    }
    chosen.push_back(best);
    used[best] = 1;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

CellResult run_cell(const ExperimentCell& cell, const SolverParams& params,
                    const AnalysisParams& analysis) {
  CellResult result;
  try {
    const Phantom phantom = make_phantom_by_name(cell.phantom);
    const std::vector<UnitDirection> dirs = spiral_hemisphere(cell.k);
    const SignalField clean = sample_field(phantom, dirs, cell.b);

    SignalField measured = clean;
    if (std::isinf(cell.snr_db)) {
      result.achieved_snr_db = std::numeric_limits<double>::infinity();
    } else {
      NoiseResult noisy = add_rician_noise(clean, cell.snr_db, cell.seed);
      measured = std::move(noisy.field);
      result.achieved_snr_db = noisy.achieved_snr_db;
    }

    const Dictionary dict = build_dictionary_by_kind(cell.dict, cell.b);
    const SensingMatrix a = assemble_sensing_matrix(dict, dirs);

    CoefficientField c;
    if (cell.mode == ReconMode::SparseOnly) {
      c = sparse_only_reconstruct(a, measured, params);
    } else {
      SplitBregmanState state = split_bregman_reconstruct(a, measured, params);
      result.bregman_iterations = state.iterations;
      c = std::move(state.c);
    }

    const Tessellation tess = icosphere(3);
    const SensingMatrix a_ref = assemble_sensing_matrix(dict, tess.vertices);
    const SignalField recon = apply_A(a_ref, c);
    const SignalField reference = sample_field(phantom, tess.vertices, cell.b);
    result.nmse = nmse(reference, recon);

    if (dict.kind != DictionaryKind::Gaussian) {
      const Eigen::MatrixXd kernel = frt_kernel_matrix(dict, tess);
      const OdfField odf = odf_from_coefficients(c, kernel, tess);
      const ModeSet modes =
          find_modes(odf, tess, analysis.rel_threshold, analysis.merge_angle_deg);
      result.delta_deg = match_and_average_error(phantom.fiber_directions(), modes);
      result.pd_pct = false_detection_rate(phantom.component_counts(), modes.counts());
    } else {
      // No closed-form Funk-Radon kernel for rotated Gaussian atoms, so the
      // ODF metrics are undefined for this dictionary.
      result.delta_deg = std::numeric_limits<double>::quiet_NaN();
      result.pd_pct = std::numeric_limits<double>::quiet_NaN();
    }
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
  }
  return result;
}

void ExperimentConfig::validate() const {
  if (phantoms.empty() || b_values.empty() || k_values.empty() || snr_values_db.empty() ||
      dicts.empty() || modes.empty() || seeds.empty()) {
    throw std::invalid_argument("experiment config: every grid axis needs at least one value");
  }
  for (const std::string& p : phantoms) (void)make_phantom_by_name(p);
  for (const std::string& d : dicts) (void)dictionary_kind_from_string(d);
  for (int k : k_values) {
    if (k < 1) throw std::invalid_argument("experiment config: K must be >= 1");
  }
  params.validate();
}

std::vector<ExperimentCell> ExperimentConfig::cells() const {
  std::vector<ExperimentCell> out;
  for (const std::string& phantom : phantoms) {
    for (double b : b_values) {
      for (int k : k_values) {
        for (double snr : snr_values_db) {
          for (const std::string& dict : dicts) {
            for (ReconMode mode : modes) {
              for (std::uint64_t seed : seeds) {
                out.push_back({phantom, b, k, snr, dict, mode, seed});
              }
            }
          }
        }
      }
    }
  }
  return out;
}

namespace {

double snr_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") {
      return std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("experiment config: bad SNR value: " + s);
  }
  return j.get<double>();
}

}  // namespace

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  const json root = json::parse(text);
  ExperimentConfig config;
  for (const json& p : root.at("phantoms")) config.phantoms.push_back(p.get<std::string>());
  for (const json& b : root.at("b_values")) config.b_values.push_back(b.get<double>());
  for (const json& k : root.at("K")) config.k_values.push_back(k.get<int>());
  for (const json& s : root.at("snr_db")) config.snr_values_db.push_back(snr_from_json(s));
  for (const json& d : root.at("dicts")) config.dicts.push_back(d.get<std::string>());
  for (const json& m : root.at("modes")) {
    config.modes.push_back(recon_mode_from_string(m.get<std::string>()));
  }
  for (const json& s : root.at("seeds")) config.seeds.push_back(s.get<std::uint64_t>());
  if (root.contains("params")) {
    config.params = solver_params_from_json_text(root["params"].dump());
  }
  if (root.contains("analysis")) {
    const json& a = root["analysis"];
    if (a.contains("rel_threshold")) config.analysis.rel_threshold = a["rel_threshold"];
    if (a.contains("merge_angle_deg")) config.analysis.merge_angle_deg = a["merge_angle_deg"];
  }
  if (root.contains("out_dir")) config.out_dir = root["out_dir"].get<std::string>();
  config.validate();
  return config;
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  json root;
  root["phantoms"] = config.phantoms;
  root["b_values"] = config.b_values;
  root["K"] = config.k_values;
  json snrs = json::array();
  for (double s : config.snr_values_db) {
    if (std::isinf(s)) {
      snrs.push_back("inf");
    } else {
      snrs.push_back(s);
    }
  }
  root["snr_db"] = snrs;
  root["dicts"] = config.dicts;
  json modes = json::array();
  for (ReconMode m : config.modes) modes.push_back(to_string(m));
  root["modes"] = modes;
  root["seeds"] = config.seeds;
  root["params"] = json::parse(solver_params_to_json(config.params));
  root["analysis"] = {{"rel_threshold", config.analysis.rel_threshold},
                      {"merge_angle_deg", config.analysis.merge_angle_deg}};
  root["out_dir"] = config.out_dir;
  return root.dump(1);
}

namespace {

std::string snr_label(double snr) {
  if (std::isinf(snr)) return "inf";
  return format_double(snr);
}

struct AggKey {
  std::string phantom;
  double b;
  int k;
  double snr;
  std::string dict;
  std::string mode;
  auto operator<=>(const AggKey&) const = default;
};

struct AggValue {
  std::vector<double> nmse, delta, pd;
  int failures = 0;
};

void accumulate(std::vector<double>& xs, double x) {
  if (!std::isnan(x)) xs.push_back(x);
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

}  // namespace

SweepOutcome run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.out_dir.empty()) {
    throw std::invalid_argument("run_sweep: out_dir must be set");
  }
  std::filesystem::create_directories(config.out_dir);

  const std::vector<ExperimentCell> cells = config.cells();
  std::vector<CellResult> results(cells.size());

  // Work pool over independent cells; per-cell determinism does not depend on
  // the schedule.
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells.size()); ++i) {
    results[static_cast<std::size_t>(i)] =
        run_cell(cells[static_cast<std::size_t>(i)], config.params, config.analysis);
  }

  const std::filesystem::path dir(config.out_dir);
  {
    std::ofstream out(dir / "results.csv");
    out << "phantom,b,K,snr_db,dict,mode,seed,status,achieved_snr_db,nmse,delta_deg,pd_pct\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const ExperimentCell& cell = cells[i];
      const CellResult& r = results[i];
      out << cell.phantom << ',' << format_double(cell.b) << ',' << cell.k << ','
          << snr_label(cell.snr_db) << ',' << cell.dict << ',' << to_string(cell.mode) << ','
          << cell.seed << ',' << (r.ok ? "ok" : ("error:" + r.error)) << ','
          << format_double(r.achieved_snr_db) << ',' << format_double(r.nmse) << ','
          << format_double(r.delta_deg) << ',' << format_double(r.pd_pct) << '\n';
    }
  }

  std::map<AggKey, AggValue> agg;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const ExperimentCell& cell = cells[i];
    AggValue& v = agg[{cell.phantom, cell.b, cell.k, cell.snr_db, cell.dict,
                       to_string(cell.mode)}];
    if (!results[i].ok) {
      ++v.failures;
      continue;
    }
    accumulate(v.nmse, results[i].nmse);
    accumulate(v.delta, results[i].delta_deg);
    accumulate(v.pd, results[i].pd_pct);
  }
  {
    std::ofstream out(dir / "results_agg.csv");
    out << "phantom,b,K,snr_db,dict,mode,n_seeds,failures,nmse_mean,nmse_std,"
           "delta_mean,delta_std,pd_mean,pd_std\n";
    for (const auto& [key, v] : agg) {
      const auto [nm, ns] = mean_std(v.nmse);
      const auto [dm, ds] = mean_std(v.delta);
      const auto [pm, ps] = mean_std(v.pd);
      out << key.phantom << ',' << format_double(key.b) << ',' << key.k << ','
          << snr_label(key.snr) << ',' << key.dict << ',' << key.mode << ','
          << v.nmse.size() << ',' << v.failures << ',' << format_double(nm) << ','
          << format_double(ns) << ',' << format_double(dm) << ',' << format_double(ds) << ','
          << format_double(pm) << ',' << format_double(ps) << '\n';
    }
  }

  // provenance sidecars mirror the resolved config
  {
    const std::string meta = experiment_config_to_json(config);
    for (const char* name : {"results.csv", "results_agg.csv"}) {
      std::ofstream out(dir / (std::string(name) + ".meta.json"));
      out << meta << '\n';
    }
  }

  SweepOutcome outcome;
  outcome.total_cells = static_cast<int>(cells.size());
  for (const CellResult& r : results) {
    if (!r.ok) ++outcome.failed_cells;
  }
  return outcome;
}

}  // namespace hardi
