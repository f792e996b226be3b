#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "swapsim/config.hpp"
#include "swapsim/fit.hpp"
#include "swapsim/metrics.hpp"
#include "swapsim/tomography.hpp"

namespace swapsim::cli {

using Json = nlohmann::ordered_json;

/// Provenance block embedded in every result file. Everything except
/// `timestamps` is a pure function of the inputs.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::uint64_t pulses = 0;
  unsigned workers = 1;
  std::vector<std::string> outputs;
  std::string started_at;
  std::string finished_at;

  Json to_json() const;
};

std::string utc_now();

/// Row-major [[re, im], ...] rows.
Json matrix_json(const CMatrix& m);
Json params_json(const MaxEntParams& p);
Json fit_json(const VisibilityFit& f);
Json bootstrap_json(const BootstrapResult& b);

/// Concurrence, fidelities, nearest Werner state and scan visibility.
Json analysis_json(const DensityMatrix& rho);

/// Collects output files under one directory and writes the result JSON with
/// its manifest last.
class OutputSet {
 public:
  OutputSet(std::filesystem::path dir, RunManifest manifest);

  /// Writes `content` to dir/name and records it in the manifest.
  void write(const std::string& name, const std::string& content);
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  void add_output(const std::string& name) { manifest_.outputs.push_back(name); }

  /// Writes {"manifest": ..., payload...} to dir/name.
  void finish(const std::string& name, const Json& payload);

 private:
  std::filesystem::path dir_;
  RunManifest manifest_;
};

}  // namespace swapsim::cli
