#include "swapsim/heralding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace swapsim {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
/// Speed of light in nm·GHz.
constexpr double kLightNmGhz = 2.99792458e8;

void check_bandwidths(const BandwidthModel& m) {
  if (!(m.dnu_p > 0.0) || !(m.dnu_s > 0.0) || !(m.dnu_i > 0.0)) {
    throw std::invalid_argument("heralding: bandwidths must be positive");
  }
}

}  // namespace

double BandwidthModel::area_s() const { return kSqrt2 * dnu_p * dnu_s; }
double BandwidthModel::area_i() const { return kSqrt2 * dnu_p * dnu_i; }
double BandwidthModel::area_si() const { return dnu_s * dnu_i; }

HeraldingBound heralding_bound(const BandwidthModel& m) {
  check_bandwidths(m);
  HeraldingBound b;
  b.eta_s = m.area_si() / m.area_i();
  b.eta_i = m.area_si() / m.area_s();
  b.valid = m.valid();
  if (!b.valid) b.warnings.emplace_back("filter bandwidth not below pump bandwidth; box model outside validity");
  if (b.eta_s > 1.0) {
    b.eta_s = 1.0;
    b.warnings.emplace_back("eta_s clamped to 1");
  }
  if (b.eta_i > 1.0) {
    b.eta_i = 1.0;
    b.warnings.emplace_back("eta_i clamped to 1");
  }
  return b;
}

double HeraldingMeasurement::eta_s() const {
  if (!(s_i > 0.0)) throw std::invalid_argument("HeraldingMeasurement: idler singles must be positive");
  return c_si / s_i;
}

double HeraldingMeasurement::eta_i() const {
  if (!(s_s > 0.0)) throw std::invalid_argument("HeraldingMeasurement: signal singles must be positive");
  return c_si / s_s;
}

double loss_chain(double bound, const std::vector<double>& factors) {
  double v = bound;
  for (double f : factors) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("loss_chain: factor outside [0, 1]");
    v *= f;
  }
  return v;
}

CouplingInference infer_coupling(double measured, double expected) {
  if (!(expected > 0.0)) throw std::invalid_argument("infer_coupling: expected efficiency must be positive");
  if (!(measured >= 0.0)) throw std::invalid_argument("infer_coupling: measured efficiency must be nonnegative");
  CouplingInference c;
  c.coupling = measured / expected;
  if (c.coupling > 1.0) {
    c.coupling = 1.0;
    c.clamped = true;
  }
  return c;
}

ConjugateBandwidth conjugate_bandwidth(double lambda_s_nm, double dlambda_s_nm, double lambda_p_nm,
                                       double pump_duration_ps, bool include_pump) {
  if (!(lambda_s_nm > 0.0) || !(lambda_p_nm > 0.0) || !(lambda_p_nm < lambda_s_nm)) {
    throw std::invalid_argument("conjugate_bandwidth: need 0 < λ_p < λ_s");
  }
  if (!(dlambda_s_nm >= 0.0)) throw std::invalid_argument("conjugate_bandwidth: negative signal width");
  if (!(pump_duration_ps > 0.0)) throw std::invalid_argument("conjugate_bandwidth: pump duration must be positive");

  ConjugateBandwidth r;
  r.lambda_i_nm = 1.0 / (1.0 / lambda_p_nm - 1.0 / lambda_s_nm);
  r.dnu_p_ghz = std::isinf(pump_duration_ps) ? 0.0 : kTimeBandwidthGaussian / (pump_duration_ps * 1e-12) * 1e-9;
  r.dnu_s_ghz = kLightNmGhz * dlambda_s_nm / (lambda_s_nm * lambda_s_nm);
  r.dnu_i_ghz = r.dnu_s_ghz + (include_pump ? r.dnu_p_ghz : 0.0);
  r.dlambda_i_nm = r.dnu_i_ghz * r.lambda_i_nm * r.lambda_i_nm / kLightNmGhz;
  return r;
}

HeraldingBound heralding_monte_carlo(const BandwidthModel& m, std::uint64_t samples, std::uint64_t seed) {
  check_bandwidths(m);
  if (samples == 0) throw std::invalid_argument("heralding_monte_carlo: need samples");
  // The band is ν_i = −ν_s + u with |u| ≤ Δν_p/√2 along ν_i, i.e. √2Δν_p
  // wide in ν_i at fixed ν_s. ν_s only needs to cover both filters.
  const double half_u = m.dnu_p / kSqrt2;
  const double span = std::max(m.dnu_s, m.dnu_i) / 2.0 + half_u;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ds(-span, span);
  std::uniform_real_distribution<double> du(-half_u, half_u);
  std::uint64_t singles_s = 0, singles_i = 0, coinc = 0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const double nu_s = ds(rng);
    const double nu_i = -nu_s + du(rng);
    const bool in_s = std::abs(nu_s) <= m.dnu_s / 2.0;
    const bool in_i = std::abs(nu_i) <= m.dnu_i / 2.0;
    singles_s += in_s;
    singles_i += in_i;
    coinc += in_s && in_i;
  }
  HeraldingBound b;
  b.valid = m.valid();
  b.eta_s = singles_i ? static_cast<double>(coinc) / static_cast<double>(singles_i) : 0.0;
  b.eta_i = singles_s ? static_cast<double>(coinc) / static_cast<double>(singles_s) : 0.0;
  return b;
}

}  // namespace swapsim
