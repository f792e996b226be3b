#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swapsim/config.hpp"

namespace swapsim::cli {

struct RunContext {
  ExperimentConfig config;
  std::string config_path;
  std::uint64_t seed = 1;
  std::uint64_t pulses = 1;
  unsigned workers = 1;
  std::filesystem::path out_dir = ".";
  std::string command;
};

struct HomOptions {
  bool conditioned = false;
  int curve_points = 11;
};

struct SwapOptions {
  bool scan = false;
  bool tomo = false;
  bool qnd = false;
  int scan_points = 12;
  std::size_t bootstrap = 100;
  std::string trace_path;
  std::uint64_t trace_pulses = 100000;
};

struct SweepOptions {
  std::string param = "mu";
  std::vector<double> values;
  bool qnd = false;
};

struct ReconstructOptions {
  std::string data_path;
  std::size_t bootstrap = 100;
};

int cmd_hom(const RunContext& ctx, const HomOptions& opts);
int cmd_swap(const RunContext& ctx, const SwapOptions& opts);
int cmd_herald(const RunContext& ctx);
int cmd_sweep(const RunContext& ctx, const SweepOptions& opts);
int cmd_reconstruct(const RunContext& ctx, const ReconstructOptions& opts);

}  // namespace swapsim::cli
