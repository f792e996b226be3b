#include "manifest.hpp"

#include <cstdio>
#include <ctime>

#include <Eigen/Core>

#include "swapsim/fit.hpp"
#include "swapsim/io.hpp"

namespace swapsim::cli {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::string eigen_version() {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  return buf;
}

}  // namespace

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["config"] = {{"path", config_path}, {"hash", config_hash}};
  j["seed"] = seed;
  j["pulses"] = pulses;
  j["workers"] = workers;
  j["versions"] = {{"swapsim", SWAPSIM_VERSION},
                   {"eigen", eigen_version()}};
  j["outputs"] = outputs;
  j["timestamps"] = {{"started", started_at}, {"finished", finished_at}};
  return j;
}

Json matrix_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

Json params_json(const MaxEntParams& p) { return {{"theta", p.theta}, {"phi", p.phi}, {"lambda", p.lambda}}; }

Json fit_json(const VisibilityFit& f) {
  return {{"V", f.visibility},         {"V_err", f.visibility_err}, {"offset", f.offset},
          {"offset_err", f.offset_err}, {"period", f.period},        {"period_err", f.period_err},
          {"baseline", f.baseline},     {"baseline_err", f.baseline_err},
          {"chi2", f.chi2},             {"dof", f.dof}};
}

Json bootstrap_json(const BootstrapResult& b) {
  return {{"mean", b.mean}, {"std", b.stddev}, {"lo", b.lo}, {"hi", b.hi}};
}

Json analysis_json(const DensityMatrix& rho) {
  double best = -1.0;
  BellKind best_kind = BellKind::PhiPlus;
  for (BellKind k : {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus}) {
    const double f = fidelity(rho, bell_state(k));
    if (f > best) {
      best = f;
      best_kind = k;
    }
  }
  const WernerFit w = nearest_werner(rho);
  Json psi_is = nullptr;
  for (BellKind k : {BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus}) {
    if (matches_bell(w.psi, k, 1e-3)) psi_is = to_string(k);
  }
  const double vis = phase_scan_visibility(rho);
  return {{"concurrence", concurrence(rho)},
          {"fidelity_psi_plus", fidelity(rho, bell_state(BellKind::PsiPlus))},
          {"fidelity_best_bell", best},
          {"best_bell", to_string(best_kind)},
          {"visibility", vis},
          {"visibility_exceeds_separable_bound", vis > separable_visibility_bound()},
          {"werner",
           {{"v", w.v}, {"psi_params", params_json(w.params)}, {"psi_bell", psi_is}, {"fidelity", w.fidelity},
            {"degenerate", w.degenerate}}}};
}

OutputSet::OutputSet(std::filesystem::path dir, RunManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)) {
  std::filesystem::create_directories(dir_);
}

void OutputSet::write(const std::string& name, const std::string& content) {
  write_file(path(name).string(), content);
  add_output(name);
}

void OutputSet::finish(const std::string& name, const Json& payload) {
  add_output(name);
  manifest_.finished_at = utc_now();
  Json j;
  j["manifest"] = manifest_.to_json();
  for (const auto& [k, v] : payload.items()) j[k] = v;
  write_file(path(name).string(), j.dump(2) + "\n");
}

}  // namespace swapsim::cli
