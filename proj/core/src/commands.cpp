#include "urnnet/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "urnnet/error.hpp"
#include "urnnet/io.hpp"

namespace urnnet {

namespace fs = std::filesystem;

std::string resolve_out_dir(const ExperimentConfig& cfg, const std::string& out_dir_flag) {
  if (!out_dir_flag.empty()) return out_dir_flag;
  if (const char* env = std::getenv("URNNET_OUT"); env != nullptr && env[0] != '\0')
    return env;
  return cfg.out_dir;
}

namespace {

/// Creates `dir` when absent. The parent must already exist; a missing
/// parent is the caller's mistake and surfaces as an IO error with the
/// path, instead of being silently mkdir -p'd.
void ensure_leaf_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  if (fs::is_directory(p, ec)) return;
  if (fs::exists(p, ec))
    throw Error(ErrorCode::Io, "output path exists and is not a directory: " + dir);
  if (!fs::create_directory(p, ec) || ec)
    throw Error(ErrorCode::Io, "cannot create output directory " + dir +
                                   (ec ? " (" + ec.message() + ")" : std::string{}));
}

std::string run_file_name(std::size_t run, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%04zu.%s", run, ext.c_str());
  return buf;
}

int guard(std::ostream& err, int (*body)(const ExperimentConfig&, const std::string&,
                                         std::ostream&, std::ostream&),
          const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out) {
  try {
    return body(cfg, out_dir_flag, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int analyze_body(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
                 std::ostream&) {
  InteractionSystem system = system_from_config(cfg);
  SystemAnalysis analysis = analyze_system(system);
  std::string text = analysis_json(system, analysis);
  out << text;
  std::string dir = resolve_out_dir(cfg, out_dir_flag);
  if (!dir.empty()) {
    ensure_leaf_dir(dir);
    write_text_file(dir + "/analysis.json", text);
  }
  return 0;
}

int limits_body(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
                std::ostream&) {
  InteractionSystem system = system_from_config(cfg);
  SystemAnalysis analysis = analyze_system(system);
  std::string text = limits_json(system, analysis);
  out << text;
  std::string dir = resolve_out_dir(cfg, out_dir_flag);
  if (!dir.empty()) {
    ensure_leaf_dir(dir);
    write_text_file(dir + "/limits.json", text);
  }
  return 0;
}

int simulate_body(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
                  std::ostream&) {
  InteractionSystem system = system_from_config(cfg);
  std::string dir = resolve_out_dir(cfg, out_dir_flag);
  if (dir.empty()) dir = "out";
  ensure_leaf_dir(dir);

  SimulateOptions opts;
  opts.initial = cfg.initial;
  bool json = cfg.format == "json";
  std::vector<std::pair<std::size_t, std::uint64_t>> run_seeds;
  std::vector<std::string> files;
  for (std::size_t run = 0; run < cfg.n_runs; ++run) {
    std::uint64_t seed = Xoshiro256pp::derive_seed(cfg.master_seed, run);
    Trajectory t = simulate(system, cfg.schedule, seed, cfg.n_steps, opts);
    std::string name = run_file_name(run, json ? "json" : "csv");
    write_text_file(dir + "/" + name, json ? trajectory_json(t) : trajectory_csv(t));
    run_seeds.emplace_back(run, seed);
    files.push_back(std::move(name));
  }
  std::string manifest = manifest_json(config_hash(cfg), cfg.master_seed, run_seeds, files);
  write_text_file(dir + "/manifest.json", manifest);
  out << "wrote " << cfg.n_runs << " runs to " << dir << "\n";
  return 0;
}

int verify_body(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
                std::ostream&) {
  InteractionSystem system = system_from_config(cfg);
  SystemAnalysis analysis = analyze_system(system);
  EnsembleStats stats = run_ensemble(system, cfg.schedule, cfg.master_seed, cfg.n_runs,
                                     cfg.n_steps, cfg.checkpoints, cfg.initial);
  VerificationReport report = verify_against_prediction(stats, system, analysis, cfg.thresholds);
  HierarchyResiduals residuals = hierarchy_residuals(stats, system, analysis);

  std::vector<NondegeneracyEvidence> evidence;
  if (stats.n_runs >= 30) {
    for (const auto& ca : analysis.classes)
      if (ca.prediction.kind == LimitKind::RandomSynchronized ||
          ca.prediction.kind == LimitKind::RandomAntiSynchronized)
        evidence.push_back(nondegeneracy_test(stats, system, analysis, ca.class_id,
                                              cfg.thresholds.var_min));
  }

  std::string text = verification_json(report, &residuals, &evidence);
  out << text;
  std::string dir = resolve_out_dir(cfg, out_dir_flag);
  if (!dir.empty()) {
    ensure_leaf_dir(dir);
    write_text_file(dir + "/report.json", text);
    write_text_file(dir + "/finals.csv", finals_csv(stats));
  }
  return report.all_pass ? 0 : 1;
}

}  // namespace

int cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
                std::ostream& err) {
  return guard(err, analyze_body, cfg, out_dir_flag, out);
}

int cmd_limits(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
               std::ostream& err) {
  return guard(err, limits_body, cfg, out_dir_flag, out);
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
                 std::ostream& err) {
  return guard(err, simulate_body, cfg, out_dir_flag, out);
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& out_dir_flag, std::ostream& out,
               std::ostream& err) {
  return guard(err, verify_body, cfg, out_dir_flag, out);
}

}  // namespace urnnet
