// Command-line driver: phantom generation, dictionary building, field
// reconstruction, metric evaluation, and experiment sweeps.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "hardi/experiment.hpp"
#include "hardi/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double parse_snr(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  return std::stod(text);
}

void write_sidecar(const fs::path& target, const json& config) {
  std::ofstream out(target.string() + ".meta.json");
  out << config.dump(1) << '\n';
}

json params_json(const hardi::SolverParams& params) {
  return json::parse(hardi::solver_params_to_json(params));
}

struct ParamFlags {
  std::optional<double> lambda, mu, gamma, rel_change_tol, fista_tol;
  std::optional<int> max_bregman_iters, inner_fista_iters, inner_tv_iters;
  std::string params_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--params", params_file, "solver parameter JSON file");
    cmd->add_option("--lambda", lambda, "l1 weight");
    cmd->add_option("--mu", mu, "TV weight");
    cmd->add_option("--gamma", gamma, "Bregman coupling");
    cmd->add_option("--max-bregman-iters", max_bregman_iters);
    cmd->add_option("--inner-fista-iters", inner_fista_iters);
    cmd->add_option("--inner-tv-iters", inner_tv_iters);
    cmd->add_option("--rel-change-tol", rel_change_tol);
    cmd->add_option("--fista-tol", fista_tol);
  }

  hardi::SolverParams resolve() const {
    hardi::SolverParams p;
    if (!params_file.empty()) p = hardi::read_solver_params_json(params_file);
    if (lambda) p.lambda = *lambda;
    if (mu) p.mu = *mu;
    if (gamma) p.gamma = *gamma;
    if (max_bregman_iters) p.max_bregman_iters = *max_bregman_iters;
    if (inner_fista_iters) p.inner_fista_iters = *inner_fista_iters;
    if (inner_tv_iters) p.inner_tv_iters = *inner_tv_iters;
    if (rel_change_tol) p.rel_change_tol = *rel_change_tol;
    if (fista_tol) p.fista_tol = *fista_tol;
    p.validate();
    return p;
  }
};

int cmd_gen_phantom(const std::string& name, double b, int k, const std::string& snr_text,
                    std::uint64_t seed, const fs::path& out_dir, bool also_csv) {
  const double snr = parse_snr(snr_text);
  const hardi::Phantom phantom = hardi::make_phantom_by_name(name);
  const auto dirs = hardi::spiral_hemisphere(k);
  const hardi::SignalField clean = hardi::sample_field(phantom, dirs, b);
  const hardi::NoiseResult noisy = hardi::add_rician_noise(clean, snr, seed);

  fs::create_directories(out_dir);
  json meta;
  meta["command"] = "gen-phantom";
  meta["phantom"] = name;
  meta["b"] = b;
  meta["K"] = k;
  meta["snr_db"] = std::isinf(snr) ? json("inf") : json(snr);
  meta["seed"] = seed;
  meta["achieved_snr_db"] =
      std::isinf(noisy.achieved_snr_db) ? json("inf") : json(noisy.achieved_snr_db);
  meta["sigma"] = noisy.sigma;

  const fs::path clean_path = out_dir / "clean.fld";
  const fs::path noisy_path = out_dir / "noisy.fld";
  const fs::path dirs_path = out_dir / "directions.csv";
  const fs::path truth_path = out_dir / "truth.json";
  hardi::write_field(clean_path, clean);
  hardi::write_field(noisy_path, noisy.field);
  hardi::write_directions_csv(dirs_path, dirs);
  hardi::write_truth_json(truth_path, phantom, b);
  for (const fs::path& p : {clean_path, noisy_path, dirs_path, truth_path}) {
    write_sidecar(p, meta);
  }
  if (also_csv) {
    hardi::write_field_csv(out_dir / "clean.csv", clean);
    hardi::write_field_csv(out_dir / "noisy.csv", noisy.field);
  }
  std::cout << "wrote " << out_dir.string() << " (achieved SNR "
            << hardi::format_double(noisy.achieved_snr_db) << " dB)\n";
  return 0;
}

int cmd_build_dict(const std::string& kind, const std::string& dirs_file, double b,
                   const fs::path& out, bool also_csv) {
  const auto dirs = hardi::read_directions_csv(dirs_file);
  const hardi::Dictionary dict = hardi::build_dictionary_by_kind(kind, b);
  const hardi::SensingMatrix a = hardi::assemble_sensing_matrix(dict, dirs);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  hardi::write_sensing_matrix(out, a);
  if (also_csv) {
    hardi::write_sensing_matrix_csv(fs::path(out).replace_extension(".csv"), a);
  }
  json meta;
  meta["command"] = "build-dict";
  meta["kind"] = kind;
  meta["directions"] = dirs_file;
  meta["b"] = b;
  meta["K"] = a.rows();
  meta["M"] = a.cols();
  write_sidecar(out, meta);
  std::cout << "dictionary " << kind << ": K=" << a.rows() << " M=" << a.cols() << '\n';
  return 0;
}

int cmd_reconstruct(const std::string& signal_file, const std::string& dirs_file,
                    const std::string& dict_kind, const std::string& mode_text, double b,
                    const ParamFlags& flags, const hardi::AnalysisParams& analysis,
                    bool prefilter_tv, int subset, const fs::path& out_dir) {
  const hardi::SolverParams params = flags.resolve();
  const hardi::ReconMode mode = hardi::recon_mode_from_string(mode_text);

  hardi::SignalField signal = hardi::read_field(signal_file);
  std::vector<hardi::UnitDirection> dirs = hardi::read_directions_csv(dirs_file);
  if (signal.channels() != static_cast<int>(dirs.size())) {
    throw std::runtime_error("signal channels do not match direction count");
  }

  if (subset > 0) {
    const std::vector<int> keep = hardi::select_subset(dirs, subset);
    std::vector<hardi::UnitDirection> sub_dirs;
    hardi::SignalField sub(signal.dims(), subset);
    for (std::size_t i = 0; i < keep.size(); ++i) {
      sub_dirs.push_back(dirs[keep[i]]);
      for (std::int64_t v = 0; v < signal.voxel_count(); ++v) {
        sub.at(v, static_cast<int>(i)) = signal.at(v, keep[i]);
      }
    }
    dirs = std::move(sub_dirs);
    signal = std::move(sub);
  }

  if (prefilter_tv) {
    for (int c = 0; c < signal.channels(); ++c) {
      const auto filtered = hardi::tv_denoise(hardi::extract_channel(signal, c), signal.dims(),
                                              params.mu, params.inner_tv_iters);
      hardi::insert_channel(signal, c, filtered);
    }
  }

  const hardi::Dictionary dict = hardi::build_dictionary_by_kind(dict_kind, b);
  const hardi::SensingMatrix a = hardi::assemble_sensing_matrix(dict, dirs);

  hardi::CoefficientField c;
  std::vector<double> objective_trace, feasibility_trace;
  int iterations = 0;
  if (mode == hardi::ReconMode::SparseOnly) {
    c = hardi::sparse_only_reconstruct(a, signal, params);
  } else {
    hardi::SplitBregmanState state = hardi::split_bregman_reconstruct(a, signal, params);
    c = std::move(state.c);
    objective_trace = std::move(state.objective_trace);
    feasibility_trace = std::move(state.feasibility_trace);
    iterations = state.iterations;
  }

  const hardi::Tessellation tess = hardi::icosphere(3);
  const hardi::SensingMatrix a_ref = hardi::assemble_sensing_matrix(dict, tess.vertices);
  const hardi::SignalField recon = hardi::apply_A(a_ref, c);

  fs::create_directories(out_dir);
  json meta;
  meta["command"] = "reconstruct";
  meta["signal"] = signal_file;
  meta["directions"] = dirs_file;
  meta["dict"] = dict_kind;
  meta["mode"] = mode_text;
  meta["b"] = b;
  meta["K"] = static_cast<int>(dirs.size());
  meta["M"] = a.cols();
  meta["prefilter_tv"] = prefilter_tv;
  meta["subset"] = subset;
  meta["params"] = params_json(params);
  meta["analysis"] = {{"rel_threshold", analysis.rel_threshold},
                      {"merge_angle_deg", analysis.merge_angle_deg}};
  meta["bregman_iterations"] = iterations;

  const fs::path coeff_path = out_dir / "coeffs.fld";
  const fs::path recon_path = out_dir / "recon642.fld";
  const fs::path trace_path = out_dir / "trace.csv";
  hardi::write_field(coeff_path, c);
  hardi::write_field(recon_path, recon);
  write_sidecar(coeff_path, meta);
  write_sidecar(recon_path, meta);
  {
    std::ofstream trace(trace_path);
    trace << "iteration,objective,feasibility_gap\n";
    for (std::size_t i = 0; i < objective_trace.size(); ++i) {
      trace << (i + 1) << ',' << hardi::format_double(objective_trace[i]) << ','
            << hardi::format_double(feasibility_trace[i]) << '\n';
    }
    write_sidecar(trace_path, meta);
  }
  // Sparse export kicks in once the coefficient field is mostly exact zeros.
  if (hardi::zero_fraction(c) > 0.8) {
    const fs::path sparse_path = out_dir / "coeffs_sparse.csv";
    std::ofstream sparse(sparse_path);
    sparse << "voxel,atom,value\n";
    for (const hardi::SparseEntry& e : hardi::to_sparse(c)) {
      sparse << e.voxel << ',' << e.channel << ',' << hardi::format_double(e.value) << '\n';
    }
    write_sidecar(sparse_path, meta);
  }

  if (dict.kind != hardi::DictionaryKind::Gaussian) {
    const Eigen::MatrixXd kernel = hardi::frt_kernel_matrix(dict, tess);
    const hardi::OdfField odf = hardi::odf_from_coefficients(c, kernel, tess);
    hardi::VectorField odf_field(odf.dims, odf.vertex_count);
    odf_field.data() = odf.values;
    const hardi::ModeSet modes =
        hardi::find_modes(odf, tess, analysis.rel_threshold, analysis.merge_angle_deg);
    const fs::path odf_path = out_dir / "odf.fld";
    const fs::path modes_path = out_dir / "modes.json";
    hardi::write_field(odf_path, odf_field);
    hardi::write_modes_json(modes_path, modes);
    write_sidecar(odf_path, meta);
    write_sidecar(modes_path, meta);
  }

  std::cout << "reconstructed " << signal_file << " -> " << out_dir.string() << '\n';
  return 0;
}

int cmd_evaluate(const std::string& truth_file, const fs::path& recon_dir,
                 const fs::path& out_prefix) {
  double b = 0.0;
  const hardi::Phantom phantom = hardi::read_truth_json(truth_file, &b);
  const hardi::SignalField recon = hardi::read_field(recon_dir / "recon642.fld");

  const hardi::Tessellation tess = hardi::icosphere(3);
  if (recon.channels() != tess.vertex_count()) {
    throw std::runtime_error("recon642.fld does not hold 642 reference channels");
  }
  const hardi::SignalField reference = hardi::sample_field(phantom, tess.vertices, b);
  const double err = hardi::nmse(reference, recon);

  double delta = std::numeric_limits<double>::quiet_NaN();
  double pd = std::numeric_limits<double>::quiet_NaN();
  const fs::path modes_path = recon_dir / "modes.json";
  if (fs::exists(modes_path)) {
    const hardi::ModeSet modes = hardi::read_modes_json(modes_path);
    delta = hardi::match_and_average_error(phantom.fiber_directions(), modes);
    pd = hardi::false_detection_rate(phantom.component_counts(), modes.counts());
  }

  // provenance columns come from the reconstruction sidecar when present
  json recon_meta;
  const fs::path sidecar = recon_dir / "recon642.fld.meta.json";
  if (fs::exists(sidecar)) {
    std::ifstream in(sidecar);
    recon_meta = json::parse(in);
  }

  if (out_prefix.has_parent_path()) fs::create_directories(out_prefix.parent_path());
  const fs::path csv_path = out_prefix.string() + ".csv";
  const fs::path json_path = out_prefix.string() + ".json";
  {
    std::ofstream out(csv_path);
    out << "phantom,b,K,dict,mode,nmse,delta_deg,pd_pct\n";
    out << phantom.name << ',' << hardi::format_double(b) << ','
        << (recon_meta.contains("K") ? std::to_string(recon_meta["K"].get<int>()) : "") << ','
        << (recon_meta.contains("dict") ? recon_meta["dict"].get<std::string>() : "") << ','
        << (recon_meta.contains("mode") ? recon_meta["mode"].get<std::string>() : "") << ','
        << hardi::format_double(err) << ',' << hardi::format_double(delta) << ','
        << hardi::format_double(pd) << '\n';
  }
  json result;
  result["phantom"] = phantom.name;
  result["b"] = b;
  result["nmse"] = err;
  result["delta_deg"] = std::isnan(delta) ? json() : json(delta);
  result["pd_pct"] = std::isnan(pd) ? json() : json(pd);
  result["recon_meta"] = recon_meta;
  {
    std::ofstream out(json_path);
    out << result.dump(1) << '\n';
  }
  std::cout << "nmse=" << hardi::format_double(err) << " delta=" << hardi::format_double(delta)
            << " pd=" << hardi::format_double(pd) << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_file, const std::string& out_dir_override) {
  std::ifstream in(config_file);
  if (!in) throw std::runtime_error("cannot open config: " + config_file);
  std::ostringstream ss;
  ss << in.rdbuf();
  hardi::ExperimentConfig config = hardi::experiment_config_from_json_text(ss.str());
  if (!out_dir_override.empty()) config.out_dir = out_dir_override;
  if (config.out_dir.empty()) throw std::runtime_error("sweep: out_dir not set");

  const hardi::SweepOutcome outcome = hardi::run_sweep(config);
  {
    std::ofstream meta(fs::path(config.out_dir) / "config.resolved.json");
    meta << hardi::experiment_config_to_json(config) << '\n';
  }
  std::cout << "sweep: " << outcome.total_cells - outcome.failed_cells << '/'
            << outcome.total_cells << " cells ok -> " << config.out_dir << '\n';
  return outcome.failed_cells == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HARDI signal-field reconstruction toolkit"};
  app.require_subcommand(1);

  int threads = 0;
  std::uint64_t global_seed = 1;
  std::string global_out;
  app.add_option("--threads", threads, "OpenMP thread count (0 = library default)");
  auto* seed_opt = app.add_option("--seed", global_seed, "default seed for subcommands");
  auto* out_opt = app.add_option("--out-dir", global_out, "default output directory");

  // gen-phantom
  auto* gen = app.add_subcommand("gen-phantom", "synthesize a phantom data set");
  std::string gen_name = "phantom1", gen_snr = "18";
  double gen_b = 3000.0;
  int gen_k = 16;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--name", gen_name, "phantom1 | phantom2")->required();
  gen->add_option("--b", gen_b, "b-value in s/mm^2");
  gen->add_option("--K", gen_k, "number of diffusion directions");
  gen->add_option("--snr", gen_snr, "target SNR in dB, or 'inf'");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "noise seed");
  auto* gen_out_opt = gen->add_option("--out-dir", gen_out, "output directory");
  bool gen_csv = false;
  gen->add_flag("--csv", gen_csv, "also write CSV copies of the fields");

  // build-dict
  auto* bd = app.add_subcommand("build-dict", "assemble a sensing matrix");
  std::string bd_kind, bd_dirs, bd_out;
  double bd_b = 3000.0;
  bool bd_csv = false;
  bd->add_option("--kind", bd_kind, "rdg | sh8 | gss")->required();
  bd->add_option("--directions", bd_dirs, "directions CSV")->required();
  bd->add_option("--b", bd_b, "b-value (used by the gss kernel)");
  bd->add_option("--out", bd_out, "output .bin path")->required();
  bd->add_flag("--csv", bd_csv, "also write a CSV copy");

  // reconstruct
  auto* rc = app.add_subcommand("reconstruct", "recover a coefficient field");
  std::string rc_signal, rc_dirs, rc_dict, rc_mode = "tv", rc_out;
  double rc_b = 3000.0;
  bool rc_prefilter = false;
  int rc_subset = 0;
  ParamFlags rc_params;
  hardi::AnalysisParams rc_analysis;
  rc->add_option("--signal", rc_signal, "input signal field (.fld)")->required();
  rc->add_option("--directions", rc_dirs, "directions CSV")->required();
  rc->add_option("--dict", rc_dict, "rdg | sh8 | gss")->required();
  rc->add_option("--mode", rc_mode, "cs | tv");
  rc->add_option("--b", rc_b, "b-value (used by the gss kernel)");
  rc->add_flag("--prefilter-tv", rc_prefilter, "TV-filter the input channels first");
  rc->add_option("--subset", rc_subset, "greedy quasi-uniform subset of K directions");
  rc->add_option("--mode-threshold", rc_analysis.rel_threshold, "relative mode threshold");
  rc->add_option("--merge-angle", rc_analysis.merge_angle_deg, "mode merge angle (deg)");
  auto* rc_out_opt = rc->add_option("--out-dir", rc_out, "output directory");
  rc_params.attach(rc);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score a reconstruction against ground truth");
  std::string ev_truth, ev_recon, ev_out = "metrics";
  ev->add_option("--truth", ev_truth, "truth JSON")->required();
  ev->add_option("--recon-dir", ev_recon, "reconstruction output directory")->required();
  ev->add_option("--out", ev_out, "output prefix (.csv/.json)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "run an experiment grid");
  std::string sw_config, sw_out;
  sw->add_option("--config", sw_config, "experiment config JSON")->required();
  sw->add_option("--out-dir", sw_out, "override the config out_dir");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  // global --seed / --out-dir act as defaults for the subcommand options
  if (seed_opt->count() && !gen_seed_opt->count()) gen_seed = global_seed;
  if (out_opt->count()) {
    if (!gen_out_opt->count()) gen_out = global_out;
    if (!rc_out_opt->count()) rc_out = global_out;
    if (sw_out.empty()) sw_out = global_out;
  }
  if (gen->parsed() && gen_out.empty()) {
    std::cerr << "error: gen-phantom needs --out-dir (or the global --out-dir)\n";
    return 1;
  }
  if (rc->parsed() && rc_out.empty()) {
    std::cerr << "error: reconstruct needs --out-dir (or the global --out-dir)\n";
    return 1;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_phantom(gen_name, gen_b, gen_k, gen_snr, gen_seed, gen_out, gen_csv);
    }
    if (bd->parsed()) return cmd_build_dict(bd_kind, bd_dirs, bd_b, bd_out, bd_csv);
    if (rc->parsed()) {
      return cmd_reconstruct(rc_signal, rc_dirs, rc_dict, rc_mode, rc_b, rc_params,
                             rc_analysis, rc_prefilter, rc_subset, rc_out);
    }
    if (ev->parsed()) return cmd_evaluate(ev_truth, ev_recon, ev_out);
    if (sw->parsed()) return cmd_sweep(sw_config, sw_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
