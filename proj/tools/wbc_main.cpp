// Command-line surface for the wireless blockchain contract toolkit.
//
// Exit codes: 0 success, 1 validation/config error, 2 verification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wbc/config.hpp"
#include "wbc/contract.hpp"
#include "wbc/core_model.hpp"
#include "wbc/curve_fit.hpp"
#include "wbc/experiments.hpp"
#include "wbc/fork_sim.hpp"
#include "wbc/version.hpp"

namespace fs = std::filesystem;

namespace {

struct CliOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<long> trials;
  std::optional<std::string> out_dir;
  bool force = false;
};

wbc::RunConfig effective_config(const CliOptions& opt) {
  wbc::RunConfig config =
      opt.config_path.empty() ? wbc::default_config() : wbc::load_config(opt.config_path);
  if (opt.seed) config.simulation.seed = *opt.seed;
  if (opt.trials) config.simulation.trials = *opt.trials;
  if (const char* env = std::getenv("WBC_OUT"); env && *env) config.out_dir = env;
  if (opt.out_dir) config.out_dir = *opt.out_dir;
  wbc::validate(config);
  return config;
}

std::string out_path(const wbc::RunConfig& config, const std::string& name) {
  fs::create_directories(config.out_dir);
  return (fs::path(config.out_dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

wbc::FitParams load_fit_or_default(const std::string& fit_path,
                                   const wbc::RunConfig& config, bool force) {
  if (fit_path.empty()) {
    wbc::FitParams fit = wbc::default_fit_params();
    fit.z = config.network.z;
    fit.p_l = config.network.p_l;
    return fit;
  }
  std::ifstream in(fit_path);
  if (!in) throw std::invalid_argument("fit: cannot open " + fit_path);
  wbc::FitParams fit = wbc::fit_params_from_json(in);
  if (!force && (fit.z != config.network.z || fit.p_l != config.network.p_l)) {
    throw std::invalid_argument(
        "fit: context (z=" + std::to_string(fit.z) + ", p_l=" + std::to_string(fit.p_l) +
        ") does not match the config; rerun with --force to override");
  }
  return fit;
}

int cmd_simulate_pc(const CliOptions& opt) {
  const auto config = effective_config(opt);
  const auto est = wbc::estimate_pc(config.network.z, config.network.p_l,
                                    config.simulation.trials, config.simulation.seed,
                                    config.simulation.buckets);
  std::ostringstream csv;
  wbc::write_pc_samples_csv(csv, est.samples);
  const std::string samples_path = out_path(config, "pc_samples.csv");
  write_text(samples_path, csv.str());
  for (int k : est.skipped_buckets)
    std::cerr << "note: bucket " << k << " skipped, no eligible origin\n";
  wbc::write_manifest(out_path(config, "manifest.json"), "simulate-pc", config,
                      {samples_path});
  std::cout << "wrote " << samples_path << " (" << est.samples.size() << " buckets)\n";
  return 0;
}

int cmd_fit_pc(const CliOptions& opt, const std::string& input, bool force) {
  const auto config = effective_config(opt);
  std::ifstream in(input);
  if (!in) throw std::invalid_argument("samples: cannot open " + input);
  const auto samples = wbc::read_pc_samples_csv(in);
  if (!force) {
    for (const auto& s : samples) {
      if (s.z != config.network.z || s.p_l != config.network.p_l)
        throw std::invalid_argument(
            "samples: context (z, p_l) does not match the config; use --force");
    }
  }
  const auto report = wbc::fit_pc(samples);
  const std::string fit_path = out_path(config, "fit.json");
  write_text(fit_path, wbc::fit_report_to_json(report, wbc::config_hash(config)));
  wbc::write_manifest(out_path(config, "manifest.json"), "fit-pc", config, {fit_path});
  std::cout << "fit: beta = (" << report.params.beta1 << ", " << report.params.beta2
            << ", " << report.params.beta3 << "), adj R^2 = " << report.adj_r_squared
            << ", rmse = " << report.rmse << "\n";
  if (!report.converged)
    std::cerr << "warning: beta3 search pinned at a bracket edge\n";
  std::cout << "wrote " << fit_path << "\n";
  return 0;
}

int cmd_solve_contract(const CliOptions& opt, const std::string& fit_path) {
  const auto config = effective_config(opt);
  const auto fit = load_fit_or_default(fit_path, config, opt.force);
  const auto types = wbc::types_from_config(config, fit);
  const auto menu = wbc::solve(types, config.econ, config.network.z);
  const auto report = wbc::verify_menu(menu, types, config.econ);

  const std::string menu_json = out_path(config, "menu.json");
  write_text(menu_json,
             wbc::menu_to_json(menu, types, config.econ, wbc::config_hash(config)));
  std::ostringstream csv;
  wbc::write_menu_csv(csv, menu, types, config.econ);
  const std::string menu_csv = out_path(config, "menu.csv");
  write_text(menu_csv, csv.str());
  wbc::write_manifest(out_path(config, "manifest.json"), "solve-contract", config,
                      {menu_json, menu_csv});

  std::cout << "solved " << types.size() << " types, blockchain utility "
            << menu.blockchain_utility << ", " << menu.pools.size() << " pools\n";
  if (!report.pass) {
    std::cerr << "verification FAILED: " << report.worst_check << " (violation "
              << report.worst_violation << ")\n";
    return 2;
  }
  std::cout << "verification passed (" << report.ir_checks << " IR, "
            << report.ic_checks << " IC checks)\n";
  return 0;
}

int cmd_verify(const CliOptions& opt, const std::string& menu_path) {
  const auto config = effective_config(opt);
  std::ifstream in(menu_path);
  if (!in) throw std::invalid_argument("menu: cannot open " + menu_path);
  const auto file = wbc::menu_from_json(in);
  const auto report = wbc::verify_menu(file.menu, file.types, config.econ);
  if (!report.pass) {
    std::cerr << "verification FAILED: " << report.worst_check << " (violation "
              << report.worst_violation << ")\n";
    return 2;
  }
  std::cout << "verification passed (" << report.ir_checks << " IR, "
            << report.ic_checks << " IC checks), worst slack "
            << report.worst_violation << "\n";
  return 0;
}

int cmd_compare(const CliOptions& opt, const std::string& fit_path) {
  const auto config = effective_config(opt);
  const auto fit = load_fit_or_default(fit_path, config, opt.force);
  const auto types = wbc::types_from_config(config, fit);
  std::vector<wbc::MechanismResult> rows;
  rows.push_back(wbc::perfect_information_result(types, config.econ, config.network.z));
  rows.push_back(wbc::proposed_result(types, config.econ, config.network.z));
  rows.push_back(
      wbc::adverse_selection_only_menu(types, config.econ, config.network.z).realized);
  rows.push_back(wbc::fixed_pow_reward(types, config.econ, config.network.z));
  std::ostringstream csv;
  wbc::write_mechanisms_csv(csv, rows);
  const std::string path = out_path(config, "mechanisms.csv");
  write_text(path, csv.str());
  wbc::write_manifest(out_path(config, "manifest.json"), "compare", config, {path});
  for (const auto& r : rows)
    std::cout << wbc::mechanism_name(r.mechanism) << ": " << r.blockchain_utility
              << "\n";
  return 0;
}

int cmd_sweep(const CliOptions& opt, const std::string& what,
              const std::string& fit_path) {
  const auto config = effective_config(opt);
  std::vector<std::string> artifacts;

  if (what == "epsilon" || what == "all") {
    const auto fit = load_fit_or_default(fit_path, config, opt.force);
    const auto types = wbc::types_from_config(config, fit);
    const auto rows =
        wbc::sweep_epsilon(config.sweep.epsilon_min, config.sweep.epsilon_max,
                           config.sweep.epsilon_step, types, config.econ,
                           config.network.z);
    std::ostringstream csv;
    wbc::write_mechanisms_csv(csv, rows);
    const std::string path = out_path(config, "sweep_epsilon.csv");
    write_text(path, csv.str());
    artifacts.push_back(path);
  }
  if (what == "pc" || what == "all") {
    const auto cells = wbc::sweep_pc_surfaces(
        config.sweep.z_list, config.sweep.p_l_list, config.simulation.trials,
        config.simulation.seed, config.simulation.buckets);
    std::ostringstream csv;
    wbc::write_pc_surfaces_csv(csv, cells);
    const std::string path = out_path(config, "sweep_pc.csv");
    write_text(path, csv.str());
    artifacts.push_back(path);
  }
  if (what == "surfaces" || what == "all") {
    const auto fit = load_fit_or_default(fit_path, config, opt.force);
    const auto rows =
        wbc::energy_and_g_surfaces(wbc::default_capability_grid(), config.network,
                                   config.channel, fit, config.econ);
    std::ostringstream csv;
    wbc::write_capability_surface_csv(csv, rows);
    const std::string path = out_path(config, "surfaces.csv");
    write_text(path, csv.str());
    artifacts.push_back(path);
  }
  if (artifacts.empty())
    throw std::invalid_argument("sweep: --what must be epsilon, pc, surfaces, or all");
  wbc::write_manifest(out_path(config, "manifest.json"), "sweep " + what, config,
                      artifacts);
  for (const auto& a : artifacts) std::cout << "wrote " << a << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wireless blockchain contract toolkit"};
  app.set_version_flag("--version", wbc::kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  CliOptions opt;
  app.add_option("--config", opt.config_path, "path to a run configuration JSON");
  app.add_option("--seed", opt.seed, "override simulation seed");
  app.add_option("--trials", opt.trials, "override trials per bucket");
  app.add_option("--out", opt.out_dir, "override output directory");
  app.add_flag("--force", opt.force, "skip artifact context checks");

  auto* sim = app.add_subcommand("simulate-pc",
                                 "estimate confirmation probability vs connectivity");
  auto* fit = app.add_subcommand("fit-pc", "fit the logarithmic model to samples");
  std::string fit_input;
  fit->add_option("samples", fit_input, "pc samples CSV")->required();
  auto* solve = app.add_subcommand("solve-contract", "design the optimal menu");
  std::string solve_fit;
  solve->add_option("--fit", solve_fit, "fit report JSON (default: shipped parameters)");
  auto* verify = app.add_subcommand("verify", "re-check a contract menu file");
  std::string verify_menu_path;
  verify->add_option("menu", verify_menu_path, "menu JSON")->required();
  auto* compare = app.add_subcommand("compare", "compare incentive mechanisms");
  std::string compare_fit;
  compare->add_option("--fit", compare_fit, "fit report JSON");
  auto* sweep = app.add_subcommand("sweep", "run parameter sweeps");
  std::string sweep_what = "epsilon";
  std::string sweep_fit;
  sweep->add_option("--what", sweep_what, "epsilon | pc | surfaces | all");
  sweep->add_option("--fit", sweep_fit, "fit report JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate_pc(opt);
    if (fit->parsed()) return cmd_fit_pc(opt, fit_input, opt.force);
    if (solve->parsed()) return cmd_solve_contract(opt, solve_fit);
    if (verify->parsed()) return cmd_verify(opt, verify_menu_path);
    if (compare->parsed()) return cmd_compare(opt, compare_fit);
    if (sweep->parsed()) return cmd_sweep(opt, sweep_what, sweep_fit);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
