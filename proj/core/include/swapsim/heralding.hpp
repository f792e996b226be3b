#pragma once

// Box-spectrum heralding model: joint-spectrum overlap areas, loss chains,
// coupling inference and the idler bandwidth implied by energy conservation.

#include <cstdint>
#include <string>
#include <vector>

namespace swapsim {

/// Bandwidths in GHz.
struct BandwidthModel {
  double dnu_p = 0.0;
  double dnu_s = 0.0;
  double dnu_i = 0.0;

  double area_s() const;   // √2 Δν_p Δν_s
  double area_i() const;   // √2 Δν_p Δν_i
  double area_si() const;  // Δν_s Δν_i
  /// Both filters narrower than the pump band.
  bool valid() const { return dnu_s < dnu_p && dnu_i < dnu_p; }
};

struct HeraldingBound {
  double eta_s = 0.0;
  double eta_i = 0.0;
  bool valid = true;
  std::vector<std::string> warnings;
};

/// η_s = Δν_s/(√2 Δν_p), η_i = Δν_i/(√2 Δν_p); clamped at 1 with a warning
/// outside the model's validity range.
HeraldingBound heralding_bound(const BandwidthModel& m);

struct HeraldingMeasurement {
  double c_si = 0.0;
  double s_s = 0.0;
  double s_i = 0.0;

  double eta_s() const;  // C_si / S_i
  double eta_i() const;  // C_si / S_s
};

/// bound · Π factors.
double loss_chain(double bound, const std::vector<double>& factors);

struct CouplingInference {
  double coupling = 0.0;
  bool clamped = false;
};

/// measured / expected, clamped to [0, 1].
CouplingInference infer_coupling(double measured, double expected);

struct ConjugateBandwidth {
  double lambda_i_nm = 0.0;
  double dlambda_i_nm = 0.0;
  double dnu_p_ghz = 0.0;
  double dnu_s_ghz = 0.0;
  double dnu_i_ghz = 0.0;
};

inline constexpr double kTimeBandwidthGaussian = 0.44;

/// Idler wavelength and width from 1/λ_p = 1/λ_s + 1/λ_i and
/// Δν_i = Δν_s (+ Δν_p when `include_pump`), Δν_p = 0.44 / pump duration.
/// An infinite pump duration gives Δν_p = 0.
ConjugateBandwidth conjugate_bandwidth(double lambda_s_nm, double dlambda_s_nm, double lambda_p_nm,
                                       double pump_duration_ps, bool include_pump = true);

/// Monte Carlo estimate of (η_s, η_i): samples pairs uniformly inside the
/// diagonal pump band (width Δν_p across the anti-diagonal) and applies the
/// two box filters.
HeraldingBound heralding_monte_carlo(const BandwidthModel& m, std::uint64_t samples, std::uint64_t seed);

}  // namespace swapsim
