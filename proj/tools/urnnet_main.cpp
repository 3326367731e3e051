#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "urnnet/commands.hpp"
#include "urnnet/error.hpp"
#include "urnnet/io.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> steps;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "experiment config file")->required();
  cmd->add_option("-o,--out", f.out_dir, "output directory (overrides URNNET_OUT and config)");
  cmd->add_option("--format", f.format, "trajectory format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "master seed override");
  cmd->add_option("--runs", f.runs, "run count override");
  cmd->add_option("--steps", f.steps, "step count override");
}

int load_config(const CommonFlags& f, urnnet::ExperimentConfig& cfg) {
  std::string text;
  try {
    text = urnnet::read_text_file(f.config_path);
  } catch (const urnnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::string base_dir = std::filesystem::path(f.config_path).parent_path().string();
  urnnet::ParseResult parsed = urnnet::parse_config(text, base_dir);
  if (!parsed.ok()) {
    std::cerr << "config " << f.config_path << " has " << parsed.issues.size()
              << " problem(s):\n";
    for (const auto& i : parsed.issues) std::cerr << "  " << i.render() << "\n";
    return 2;
  }
  cfg = std::move(*parsed.config);
  if (f.seed.has_value()) cfg.master_seed = *f.seed;
  if (f.runs.has_value()) cfg.n_runs = *f.runs;
  if (f.steps.has_value()) cfg.n_steps = *f.steps;
  if (!f.format.empty()) cfg.format = f.format;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analysis, prediction and Monte Carlo verification of interacting "
               "reinforced stochastic processes on weighted directed networks"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* analyze = app.add_subcommand("analyze", "classes, levels, drift diagnostics, "
                                                    "limit predictions; no simulation");
  CLI::App* simulate = app.add_subcommand("simulate", "write per-run trajectories and a manifest");
  CLI::App* verify = app.add_subcommand("verify", "simulate an ensemble and check every class "
                                                  "against its predicted limit (exit 0 = all pass)");
  CLI::App* limits = app.add_subcommand("limits", "point and affine limit solves only");
  for (CLI::App* cmd : {analyze, simulate, verify, limits}) add_common(cmd, flags);

  CLI11_PARSE(app, argc, argv);

  urnnet::ExperimentConfig cfg;
  if (int rc = load_config(flags, cfg); rc != 0) return rc;

  if (analyze->parsed())
    return urnnet::cmd_analyze(cfg, flags.out_dir, std::cout, std::cerr);
  if (simulate->parsed())
    return urnnet::cmd_simulate(cfg, flags.out_dir, std::cout, std::cerr);
  if (verify->parsed())
    return urnnet::cmd_verify(cfg, flags.out_dir, std::cout, std::cerr);
  return urnnet::cmd_limits(cfg, flags.out_dir, std::cout, std::cerr);
}
