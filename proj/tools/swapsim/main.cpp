// swapsim: command-line front end for the entanglement-swapping simulator.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "swapsim/error.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string seed;
  std::string pulses;
  unsigned workers = 1;
  std::string out = ".";
};

// Accepts plain integers and exact scientific notation ("1e12").
std::uint64_t parse_count(const std::string& text, const char* flag) {
  try {
    std::size_t used = 0;
    if (text.find_first_of("eE.") == std::string::npos) {
      const auto v = std::stoull(text, &used);
      if (used == text.size() && text.front() != '-') return v;
    } else {
      const double v = std::stod(text, &used);
      if (used == text.size() && v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
    }
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError(flag, "expected a nonnegative integer, got '" + text + "'");
}

void add_common(CLI::App* app, CommonFlags& f, bool needs_config) {
  auto* cfg = app->add_option("--config", f.config, "Bench description (INI)");
  if (needs_config) cfg->required();
  app->add_option("--seed", f.seed, "Master seed (overrides run.seed)");
  app->add_option("--pulses", f.pulses, "Pulses per setting (overrides run.pulses)");
  app->add_option("--workers", f.workers, "Worker threads")->envname("SWAPSIM_WORKERS")->check(CLI::PositiveNumber);
  app->add_option("--out", f.out, "Output directory")->capture_default_str();
}

swapsim::cli::RunContext make_context(const CommonFlags& f, int argc, char** argv) {
  swapsim::cli::RunContext ctx;
  if (!f.config.empty()) {
    ctx.config = swapsim::load_config(f.config);
    ctx.config_path = f.config;
  }
  ctx.seed = f.seed.empty() ? ctx.config.seed : parse_count(f.seed, "--seed");
  ctx.pulses = f.pulses.empty() ? ctx.config.pulses : parse_count(f.pulses, "--pulses");
  if (ctx.pulses == 0) throw CLI::ValidationError("--pulses", "must be positive");
  ctx.workers = f.workers;
  ctx.out_dir = f.out;
  ctx.command = "swapsim";
  for (int i = 1; i < argc; ++i) ctx.command += std::string(" ") + argv[i];
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace swapsim::cli;
  CLI::App app{"Time-bin entanglement-swapping simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SWAPSIM_VERSION);

  CommonFlags common;

  HomOptions hom;
  auto* hom_cmd = app.add_subcommand("hom", "Two-photon interference at the BSM beam splitter");
  add_common(hom_cmd, common, true);
  hom_cmd->add_flag("--conditioned", hom.conditioned, "Also require a click on each 795 nm side");
  hom_cmd->add_option("--points", hom.curve_points, "Points on the distinguishability curve")
      ->check(CLI::Range(2, 1000));

  SwapOptions swap;
  auto* swap_cmd = app.add_subcommand("swap", "Entanglement swapping: phase scan or tomography");
  add_common(swap_cmd, common, true);
  auto* scan_flag = swap_cmd->add_flag("--scan", swap.scan, "Phase scan of A against D at phase 0");
  auto* tomo_flag = swap_cmd->add_flag("--tomo", swap.tomo, "36-setting state tomography");
  scan_flag->excludes(tomo_flag);
  swap_cmd->add_flag("--qnd", swap.qnd, "Discard pulses with more than one pair per source");
  swap_cmd->add_option("--points", swap.scan_points, "Scan points over one period")->check(CLI::Range(5, 720));
  swap_cmd->add_option("--bootstrap", swap.bootstrap, "Bootstrap resamples")->check(CLI::Range(100, 100000));
  swap_cmd->add_option("--trace", swap.trace_path, "Stream per-pulse clicks of the first setting to this CSV");
  swap_cmd->add_option("--trace-pulses", swap.trace_pulses, "Pulses in the click trace")->check(CLI::PositiveNumber);

  auto* herald_cmd = app.add_subcommand("herald", "Heralding-efficiency budget");
  add_common(herald_cmd, common, true);

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Tomography pipeline over a parameter list");
  add_common(sweep_cmd, common, true);
  sweep_cmd->add_option("--param", sweep.param, "mu, overlap or state_fidelity")
      ->check(CLI::IsMember({"mu", "overlap", "state_fidelity"}))
      ->capture_default_str();
  sweep_cmd->add_option("--values", sweep.values, "Comma-separated values")->required()->delimiter(',');
  sweep_cmd->add_flag("--qnd", sweep.qnd, "Discard pulses with more than one pair per source");

  ReconstructOptions rec;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Maximum-likelihood reconstruction of a tomography CSV");
  add_common(rec_cmd, common, false);
  rec_cmd->add_option("--data", rec.data_path, "Tomography dataset CSV")->required()->check(CLI::ExistingFile);
  rec_cmd->add_option("--bootstrap", rec.bootstrap, "Bootstrap resamples")->check(CLI::Range(100, 100000));

  try {
    app.parse(argc, argv);
    if (*swap_cmd && !swap.scan && !swap.tomo) throw CLI::RequiredError("swap needs --scan or --tomo");
    const RunContext ctx = make_context(common, argc, argv);
    if (*hom_cmd) return cmd_hom(ctx, hom);
    if (*swap_cmd) return cmd_swap(ctx, swap);
    if (*herald_cmd) return cmd_herald(ctx);
    if (*sweep_cmd) return cmd_sweep(ctx, sweep);
    return cmd_reconstruct(ctx, rec);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const swapsim::ConfigError& e) {
    std::fprintf(stderr, "swapsim: config error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "swapsim: %s\n", e.what());
    return 1;
  }
}
