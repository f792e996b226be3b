#pragma once

// Maximum-likelihood two-qubit tomography and Poisson bootstrap.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swapsim/engine.hpp"
#include "swapsim/metrics.hpp"
#include "swapsim/qstate.hpp"

namespace swapsim {

struct TomographySetting {
  Projector a = Projector::z(TimeBin::Early);
  Projector d = Projector::z(TimeBin::Early);
  std::uint64_t counts = 0;
  /// Relative exposure s_j; expected counts ∝ s_j · tr(ρ Π_a⊗Π_d).
  double exposure = 1.0;

  CMatrix joint_projector() const;
};

/// σ_Z (early, late), σ_X (Phase 0, π), σ_Y (Phase π/2, 3π/2) in that order.
std::vector<Projector> standard_projectors();

/// The 36 joint settings, A-major, with zero counts and unit exposure.
std::vector<TomographySetting> standard_settings();

/// Swap settings realising each standard projector pair: a Z projector uses
/// the Z analyzer, a phase projector the phase analyzer at that φ.
std::vector<SwapSetting> tomography_swap_settings();

/// Turns 36 records from `tomography_swap_settings` into a dataset. The count
/// for a row is the Ψ− fourfold on the projector's outcome pixel (Z bin or
/// "+" middle bin); exposure is pulses · (1/2)^{# phase-basis sides}.
std::vector<TomographySetting> tomography_dataset(const std::vector<CoincidenceRecord>& records);

/// Expected-count dataset for a known state (total counts scaled to `total`).
std::vector<TomographySetting> expected_dataset(const DensityMatrix& rho, double total,
                                                bool phase_exposure_half = true);

struct MleOptions {
  int max_iterations = 100000;
  /// Stop when the per-count log-likelihood improves by less than this.
  double tolerance = 1e-9;
  int starts = 10;
};

struct MleResult {
  DensityMatrix rho = DensityMatrix::maximally_mixed(4);
  /// Σ n_j log(p_j) with p_j the exposure-weighted normalised probabilities.
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  int best_start = 0;
};

/// Multinomial log-likelihood Σ n_j log(s_j tr(ρΠ_j) / Σ_k s_k tr(ρΠ_k)).
double log_likelihood(const std::vector<TomographySetting>& data, const DensityMatrix& rho);

/// ρ = T†T / tr(T†T) with T lower-triangular, maximised by BFGS from 10
/// deterministic starts.
MleResult mle_reconstruct(const std::vector<TomographySetting>& data, const MleOptions& opts = {});

using Statistic = std::function<double(const DensityMatrix&)>;

Statistic concurrence_statistic();
Statistic fidelity_statistic(const Ket& psi);
Statistic werner_v_statistic();
Statistic werner_fidelity_statistic();

struct BootstrapResult {
  double mean = 0.0;
  double stddev = 0.0;
  double lo = 0.0;  // 2.5th percentile
  double hi = 0.0;  // 97.5th percentile
  std::size_t resamples = 0;
  std::size_t dropped = 0;
  std::vector<double> values;  // by resample index, NaN when dropped
};

/// Redraws every count from Poisson(n_j), reconstructs, applies `stat`.
/// Resample r uses seed derive_seed(seed, r); workers only affect speed.
BootstrapResult bootstrap(const std::vector<TomographySetting>& data, std::size_t n_resamples, std::uint64_t seed,
                          const Statistic& stat, unsigned workers = 1, const MleOptions& opts = {});

/// Same resamples as `bootstrap`, several statistics per reconstruction.
std::vector<BootstrapResult> bootstrap_many(const std::vector<TomographySetting>& data, std::size_t n_resamples,
                                            std::uint64_t seed, const std::vector<Statistic>& stats,
                                            unsigned workers = 1, const MleOptions& opts = {});

/// Several values from one evaluation, e.g. sharing a single Werner fit.
using JointStatistic = std::function<std::vector<double>(const DensityMatrix&)>;

/// As `bootstrap_many`, with `stat` returning `n_stats` values per resample.
std::vector<BootstrapResult> bootstrap_joint(const std::vector<TomographySetting>& data, std::size_t n_resamples,
                                             std::uint64_t seed, const JointStatistic& stat, std::size_t n_stats,
                                             unsigned workers = 1, const MleOptions& opts = {});

}  // namespace swapsim
