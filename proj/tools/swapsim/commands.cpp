#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "manifest.hpp"
#include "swapsim/engine.hpp"
#include "swapsim/error.hpp"
#include "swapsim/fit.hpp"
#include "swapsim/heralding.hpp"
#include "swapsim/io.hpp"
#include "swapsim/tomography.hpp"

namespace swapsim::cli {

namespace {

// Stream indices for derive_seed, kept apart from the per-setting indices
// used by run_swap.
constexpr std::uint64_t kCurveStream = 0xC0C0;
constexpr std::uint64_t kBootstrapStream = 0xB007;
constexpr std::uint64_t kTraceStream = 0x7ACE;

RunManifest manifest_for(const RunContext& ctx) {
  RunManifest m;
  m.command = ctx.command;
  m.config_path = ctx.config_path;
  m.config_hash = ctx.config_path.empty() ? "" : fnv1a_hex(ctx.config.canonical());
  m.seed = ctx.seed;
  m.pulses = ctx.pulses;
  m.workers = ctx.workers;
  m.started_at = utc_now();
  return m;
}

RunOptions run_options(const RunContext& ctx, bool qnd = false) {
  RunOptions o;
  o.workers = ctx.workers;
  o.engine.qnd = qnd;
  return o;
}

std::string csv_text(const CsvTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

std::string tomography_text(const std::vector<TomographySetting>& data) {
  std::ostringstream os;
  write_tomography_csv(os, data);
  return os.str();
}

std::uint64_t total_counts(const std::vector<TomographySetting>& data) {
  std::uint64_t n = 0;
  for (const auto& s : data) n += s.counts;
  return n;
}

Json mle_json(const MleResult& r) {
  return {{"rho", matrix_json(r.rho.matrix())},
          {"log_likelihood", r.log_likelihood},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"best_start", r.best_start}};
}

Json bootstrap_block(const std::vector<TomographySetting>& data, std::size_t resamples, std::uint64_t seed,
                     unsigned workers) {
  const Ket psi_plus = bell_state(BellKind::PsiPlus);
  auto stats = [&psi_plus](const DensityMatrix& rho) {
    const WernerFit w = nearest_werner(rho);
    return std::vector<double>{concurrence(rho), fidelity(rho, psi_plus), w.v, w.fidelity};
  };
  const auto results = bootstrap_joint(data, resamples, derive_seed(seed, kBootstrapStream), stats, 4, workers);
  return {{"resamples", results[0].resamples},
          {"dropped", results[0].dropped},
          {"concurrence", bootstrap_json(results[0])},
          {"fidelity_psi_plus", bootstrap_json(results[1])},
          {"werner_v", bootstrap_json(results[2])},
          {"werner_fidelity", bootstrap_json(results[3])}};
}

const char* pixel_detector(std::size_t pixel) {
  static const char* names[] = {"A+", "A-", "D+", "D-", "BSM1", "BSM2"};
  if (pixel < kBsmPixel0) return names[pixel / 3];
  return names[4 + (pixel - kBsmPixel0) / 2];
}

int pixel_bin(std::size_t pixel) {
  return pixel < kBsmPixel0 ? static_cast<int>(pixel % 3) : static_cast<int>((pixel - kBsmPixel0) % 2);
}

void write_trace(const RunContext& ctx, const SwapSetting& setting, bool qnd, const SwapOptions& opts) {
  EngineOptions eo;
  eo.qnd = qnd;
  const PulseModel model(ctx.config, setting, eo);
  std::ofstream out(opts.trace_path);
  if (!out) throw Error("cannot open '" + opts.trace_path + "' for writing");
  out << "pulse,detector,bin\n";
  Rng rng(derive_seed(ctx.seed, kTraceStream));
  for (std::uint64_t p = 0; p < opts.trace_pulses; ++p) {
    const auto clicks = model.sample_clicks(rng);
    if (!clicks) continue;
    for (std::size_t px = 0; px < kPixels; ++px) {
      if ((*clicks >> px) & 1u) out << p << ',' << pixel_detector(px) << ',' << pixel_bin(px) << '\n';
    }
  }
  if (!out) throw Error("failed writing '" + opts.trace_path + "'");
}

}  // namespace

int cmd_hom(const RunContext& ctx, const HomOptions& opts) {
  const auto& cfg = ctx.config;
  OutputSet out(ctx.out_dir, manifest_for(ctx));
  const HomResult r = run_hom(cfg, cfg.overlap, ctx.pulses, ctx.seed, opts.conditioned, run_options(ctx));

  CsvTable curve;
  curve.header = {"overlap", "distinguishability", "probability", "counts"};
  for (int k = 0; k < opts.curve_points; ++k) {
    const double ov = opts.curve_points == 1 ? cfg.overlap : static_cast<double>(k) / (opts.curve_points - 1);
    const double p = hom_coincidence_probability(cfg, ov, opts.conditioned);
    Rng rng(derive_seed(ctx.seed, kCurveStream, static_cast<std::uint64_t>(k)));
    const auto n = sample_multinomial(ctx.pulses, {p}, rng)[0];
    curve.rows.push_back({format_number(ov), format_number(1.0 - ov), format_number(p), std::to_string(n)});
  }
  out.write("hom_curve.csv", csv_text(curve));

  out.finish("hom.json", {{"conditioned", opts.conditioned},
                          {"overlap", cfg.overlap},
                          {"V", r.visibility},
                          {"sigma", r.sigma},
                          {"N_max", r.n_max},
                          {"N_min", r.n_min},
                          {"p_max", r.p_max},
                          {"p_min", r.p_min},
                          {"V_bound_spectral",
                           hom_visibility_bound(cfg.spectrum.pump_duration_ps, cfg.spectrum.coherence_time_ps)},
                          {"thermal_bound", 1.0 / 3.0}});
  std::printf("HOM %s: V = %.4f +- %.4f (N_max %llu, N_min %llu)\n", opts.conditioned ? "conditioned" : "unconditioned",
              r.visibility, r.sigma, static_cast<unsigned long long>(r.n_max),
              static_cast<unsigned long long>(r.n_min));
  return 0;
}

int cmd_swap(const RunContext& ctx, const SwapOptions& opts) {
  const auto& cfg = ctx.config;
  OutputSet out(ctx.out_dir, manifest_for(ctx));
  std::vector<SwapSetting> settings;
  if (opts.scan) {
    for (int k = 0; k < opts.scan_points; ++k) {
      const double alpha = 2.0 * std::numbers::pi * k / opts.scan_points;
      settings.push_back({AnalyzerSetting::phase(alpha), AnalyzerSetting::phase(0.0)});
    }
  } else {
    settings = tomography_swap_settings();
  }
  const auto records = run_swap(cfg, settings, ctx.pulses, ctx.seed, run_options(ctx, opts.qnd));
  out.write("records.csv", csv_text(records_table(records)));

  if (!opts.trace_path.empty()) {
    write_trace(ctx, settings.front(), opts.qnd, opts);
    out.add_output(opts.trace_path);
  }

  if (opts.scan) {
    CsvTable curve;
    curve.header = {"alpha", "beta", "delta", "counts", "pulses"};
    std::vector<std::pair<double, double>> pts;
    Json points = Json::array();
    for (const auto& r : records) {
      const double delta = r.setting.a.phi - r.setting.d.phi;
      const auto n = r.fourfold(0, 0);
      pts.emplace_back(delta, static_cast<double>(n));
      points.push_back({{"delta", delta}, {"counts", n}});
      curve.rows.push_back({format_number(r.setting.a.phi), format_number(r.setting.d.phi), format_number(delta),
                            std::to_string(n), std::to_string(r.pulses)});
    }
    out.write("scan.csv", csv_text(curve));
    double total = 0.0;
    for (const auto& p : pts) total += p.second;
    if (total == 0.0) throw Error("scan: no fourfold coincidences recorded; increase --pulses");
    const auto fit = fit_visibility(pts);
    const auto free = fit_visibility(pts, false);
    out.finish("scan.json", {{"qnd", opts.qnd},
                             {"points", points},
                             {"fit", fit_json(fit)},
                             {"fit_free_period", fit_json(free)},
                             {"separable_bound", separable_visibility_bound()},
                             {"exceeds_separable_bound", fit.visibility > separable_visibility_bound()}});
    std::printf("scan: V = %.4f +- %.4f, free period %.4f x 2pi\n", fit.visibility, fit.visibility_err, free.period);
    return 0;
  }

  const auto data = tomography_dataset(records);
  out.write("tomography.csv", tomography_text(data));
  if (total_counts(data) == 0) throw Error("tomography: no fourfold coincidences recorded; increase --pulses");
  const auto mle = mle_reconstruct(data);
  Json analysis = analysis_json(mle.rho);
  out.finish("tomo.json", {{"qnd", opts.qnd},
                           {"total_counts", total_counts(data)},
                           {"mle", mle_json(mle)},
                           {"analysis", analysis},
                           {"bootstrap", bootstrap_block(data, opts.bootstrap, ctx.seed, ctx.workers)}});
  std::printf("tomography: %llu fourfolds, C = %.4f, F(Psi+) = %.4f, Werner v = %.4f\n",
              static_cast<unsigned long long>(total_counts(data)), analysis["concurrence"].get<double>(),
              analysis["fidelity_psi_plus"].get<double>(), analysis["werner"]["v"].get<double>());
  return 0;
}

int cmd_herald(const RunContext& ctx) {
  const auto& h = ctx.config.heralding;
  const auto& sp = ctx.config.spectrum;
  OutputSet out(ctx.out_dir, manifest_for(ctx));
  const auto bound = heralding_bound({h.pump_bandwidth_ghz, h.filter_795_ghz, h.filter_1533_ghz});
  const double exp795 = loss_chain(bound.eta_s, h.loss_795);
  const double exp1533 = loss_chain(bound.eta_i, h.loss_1533);
  const auto k795 = infer_coupling(h.measured_795, exp795);
  const auto k1533 = infer_coupling(h.measured_1533, exp1533);
  const auto bw = conjugate_bandwidth(sp.signal_wavelength_nm, sp.signal_bandwidth_nm, sp.pump_wavelength_nm,
                                      sp.pump_duration_ps, sp.pump_convolution);

  std::printf("%-8s %10s %10s %10s %10s\n", "photon", "bound", "expected", "measured", "coupling");
  auto row = [](const char* name, double b, double e, double m, const CouplingInference& k) {
    std::printf("%-8s %9.2f%% %9.2f%% %9.2f%% %9.1f%%%s\n", name, 100 * b, 100 * e, 100 * m, 100 * k.coupling,
                k.clamped ? " (clamped)" : "");
    return Json{{"photon", name},   {"bound", b},           {"expected", e},
                {"measured", m},    {"coupling", k.coupling}, {"clamped", k.clamped}};
  };
  Json rows = Json::array();
  rows.push_back(row("795nm", bound.eta_s, exp795, h.measured_795, k795));
  rows.push_back(row("1533nm", bound.eta_i, exp1533, h.measured_1533, k1533));
  for (const auto& w : bound.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("idler: %.1f nm, width %.2f nm (pump %.1f GHz)\n", bw.lambda_i_nm, bw.dlambda_i_nm, bw.dnu_p_ghz);

  out.finish("herald.json", {{"rows", rows},
                             {"valid", bound.valid},
                             {"warnings", bound.warnings},
                             {"conjugate_bandwidth",
                              {{"lambda_i_nm", bw.lambda_i_nm},
                               {"dlambda_i_nm", bw.dlambda_i_nm},
                               {"dnu_p_ghz", bw.dnu_p_ghz},
                               {"dnu_s_ghz", bw.dnu_s_ghz},
                               {"dnu_i_ghz", bw.dnu_i_ghz},
                               {"pump_convolution", sp.pump_convolution}}}});
  return 0;
}

int cmd_sweep(const RunContext& ctx, const SweepOptions& opts) {
  OutputSet out(ctx.out_dir, manifest_for(ctx));
  CsvTable table;
  table.header = {"param", "value", "concurrence", "fidelity", "visibility", "counts"};
  Json rows = Json::array();
  for (double value : opts.values) {
    ExperimentConfig cfg = ctx.config;
    if (opts.param == "mu") {
      cfg.source_ab.mu = cfg.source_cd.mu = value;
    } else if (opts.param == "overlap") {
      cfg.overlap = value;
    } else if (opts.param == "state_fidelity") {
      cfg.source_ab.state_fidelity = cfg.source_cd.state_fidelity = value;
    } else {
      throw ConfigError("--param", "expected mu, overlap or state_fidelity");
    }
    cfg.validate();
    const auto data = tomography_dataset(
        run_swap(cfg, tomography_swap_settings(), ctx.pulses, ctx.seed, run_options(ctx, opts.qnd)));
    const auto mle = mle_reconstruct(data);
    Json a = analysis_json(mle.rho);
    table.rows.push_back({opts.param, format_number(value), format_number(a["concurrence"].get<double>()),
                          format_number(a["fidelity_psi_plus"].get<double>()),
                          format_number(a["visibility"].get<double>()), std::to_string(total_counts(data))});
    rows.push_back({{"value", value}, {"total_counts", total_counts(data)}, {"mle", mle_json(mle)}, {"analysis", a}});
    std::printf("%s = %g: C = %.4f, F(Psi+) = %.4f, V = %.4f\n", opts.param.c_str(), value,
                a["concurrence"].get<double>(), a["fidelity_psi_plus"].get<double>(), a["visibility"].get<double>());
  }
  out.write("sweep.csv", csv_text(table));
  out.finish("sweep.json", {{"param", opts.param}, {"qnd", opts.qnd}, {"rows", rows}});
  return 0;
}

int cmd_reconstruct(const RunContext& ctx, const ReconstructOptions& opts) {
  RunManifest m = manifest_for(ctx);
  std::ifstream in(opts.data_path);
  if (!in) throw Error("cannot open '" + opts.data_path + "'");
  const auto data = read_tomography_csv(in);
  OutputSet out(ctx.out_dir, m);
  const auto mle = mle_reconstruct(data);
  Json analysis = analysis_json(mle.rho);
  out.finish("reconstruct.json", {{"data", {{"path", opts.data_path}, {"hash", fnv1a_hex(read_file(opts.data_path))}}},
                                  {"rows", data.size()},
                                  {"total_counts", total_counts(data)},
                                  {"mle", mle_json(mle)},
                                  {"analysis", analysis},
                                  {"bootstrap", bootstrap_block(data, opts.bootstrap, ctx.seed, ctx.workers)}});
  std::printf("reconstruct: C = %.4f, F(Psi+) = %.4f\n", analysis["concurrence"].get<double>(),
              analysis["fidelity_psi_plus"].get<double>());
  return 0;
}

}  // namespace swapsim::cli
