#pragma once

// End-to-end swapping and HOM simulation.
//
// For one analyzer setting the engine pushes every photon-number sector of both
// sources through the analyzers and the BSM beam splitter, accumulates the
// photon distribution over the 16 detector pixels, and from it the exact
// probability of every click pattern on the eight pixels that matter:
//   bit 0,1  A outcome pixels (Z: early, late; Phase: + middle, − middle)
//   bit 2,3  D outcome pixels
//   bit 4..7 BSM port1 e, port1 ℓ, port2 e, port2 ℓ
// Counts are then drawn either pulse by pulse or, for realistic efficiencies
// where fourfold events are ~1e-9 per pulse, as one multinomial draw per
// worker shard from the same exact probabilities.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swapsim/config.hpp"
#include "swapsim/detection.hpp"
#include "swapsim/optics.hpp"

namespace swapsim {

inline constexpr std::size_t kRelevantPixels = 8;
inline constexpr std::size_t kPatterns = 1u << kRelevantPixels;

struct SwapSetting {
  AnalyzerSetting a;
  AnalyzerSetting d;
  std::string label() const;
};

struct EngineOptions {
  /// Drop every pulse in which either source emitted more than one pair.
  bool qnd = false;
  /// Overrides the configured BSM overlap when ≥ 0.
  double overlap_override = -1.0;
};

/// Exact single-pulse statistics for one setting.
class PulseModel {
 public:
  PulseModel(const ExperimentConfig& config, const SwapSetting& setting, const EngineOptions& opts = {});

  struct Entry {
    Occupancy occupancy;
    double probability;
  };

  /// Photon occupancy distribution over the 16 pixels (before detection).
  const std::vector<Entry>& occupancies() const { return occupancies_; }
  /// Probability mass kept (1 unless QND discards multi-pair pulses).
  double kept_probability() const { return kept_; }
  /// P(exactly this set of relevant pixels clicks), indexed by bit pattern.
  const std::array<double, kPatterns>& pattern_probabilities() const { return patterns_; }
  /// Pixel indices of the eight relevant pixels.
  const std::array<std::size_t, kRelevantPixels>& relevant_pixels() const { return relevant_; }
  const DetectionModel& detection() const { return detection_; }

  /// Samples one pulse; returns the relevant-pixel pattern or -1 for a
  /// discarded pulse.
  int sample_pulse(Rng& rng) const;
  /// Samples one pulse and returns every pixel that clicked, or nullopt for a
  /// discarded pulse.
  std::optional<ClickMask> sample_clicks(Rng& rng) const;

  /// Maps a full 16-pixel click mask onto the relevant-pixel pattern.
  unsigned relevant_pattern(ClickMask clicks) const;

 private:
  std::vector<Entry> occupancies_;
  std::vector<double> cumulative_;
  double kept_ = 1.0;
  std::array<double, kPatterns> patterns_{};
  std::array<std::size_t, kRelevantPixels> relevant_{};
  DetectionModel detection_;
};

/// Fourfold counts for one setting: counts[bsm][a][d] with bsm 0 = Ψ−
/// pattern and 1 = Ψ+ pattern, a/d the two-bit outcome-pixel click pattern.
struct CoincidenceRecord {
  SwapSetting setting;
  std::uint64_t pulses = 0;
  std::array<std::array<std::array<std::uint64_t, 4>, 4>, 2> counts{};

  /// Events with the Ψ− pattern and a click on outcome pixel `ia` of A and
  /// `id` of D (other outcome pixel unconstrained).
  std::uint64_t fourfold(int ia, int id, BsmOutcome bsm = BsmOutcome::PsiMinus) const;
  std::uint64_t total() const;
};

enum class SamplingMode { PerPulse, Multinomial };

struct RunOptions {
  SamplingMode mode = SamplingMode::Multinomial;
  unsigned workers = 1;
  EngineOptions engine;
};

/// splitmix64-based seed derivation for shard and stream indices.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Expected record probabilities: [bsm][a][d] per pulse.
std::array<std::array<std::array<double, 4>, 4>, 2> record_probabilities(const PulseModel& model,
                                                                         bool accept_psi_plus);

/// Draws one record from a pulse model. Deterministic in (seed, index, workers).
CoincidenceRecord sample_record(const PulseModel& model, const SwapSetting& setting, bool accept_psi_plus,
                                std::uint64_t pulses, std::uint64_t seed, std::uint64_t index,
                                const RunOptions& opts);

std::vector<CoincidenceRecord> run_swap(const ExperimentConfig& config, const std::vector<SwapSetting>& settings,
                                        std::uint64_t pulses, std::uint64_t seed, const RunOptions& opts = {});

struct HomResult {
  double visibility = 0.0;
  double sigma = 0.0;
  std::uint64_t n_max = 0;
  std::uint64_t n_min = 0;
  std::uint64_t pulses = 0;
  /// Exact per-pulse coincidence probabilities behind n_max and n_min.
  double p_max = 0.0;
  double p_min = 0.0;
};

/// Per-pulse HOM coincidence probability (both BSM ports in the same bin,
/// optionally also a click on each 795 nm side) at the given overlap.
double hom_coincidence_probability(const ExperimentConfig& config, double overlap, bool conditioned);

/// N_max at overlap 0, N_min at `overlap`; V = (N_max − N_min)/N_max.
HomResult run_hom(const ExperimentConfig& config, double overlap, std::uint64_t pulses, std::uint64_t seed,
                  bool conditioned, const RunOptions& opts = {});

/// 1/√(1 + (ΔT/τ)²).
double hom_visibility_bound(double pump_duration, double coherence_time);

/// Samples a multinomial over `probs` (remaining mass is an implicit "none"
/// category) by sequential binomials.
std::vector<std::uint64_t> sample_multinomial(std::uint64_t n, const std::vector<double>& probs, Rng& rng);

}  // namespace swapsim
