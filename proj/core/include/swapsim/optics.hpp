#pragma once

// Sources, analyzers and the Bell-state-measurement beam splitter expressed as
// operations on FockState.

#include <array>
#include <cstddef>
#include <vector>

#include "swapsim/fock.hpp"
#include "swapsim/qstate.hpp"

namespace swapsim {

enum class PairStatistics { Thermal, Poissonian };
enum class SourceNoise { Depolarizing, Dephasing };

struct SourceParams {
  /// Mean number of pairs per qubit (per pulse pair).
  double mu = 0.0;
  /// Relative phase θ in (|ee⟩ + e^{iθ}|ℓℓ⟩)/√2; 0 gives Φ+, π gives Φ−.
  double phase = 0.0;
  double state_fidelity = 1.0;
  PairStatistics statistics = PairStatistics::Thermal;
  SourceNoise noise = SourceNoise::Depolarizing;

  void validate() const;
};

/// Photon-number probabilities P(n pairs), n = 0..max_pairs, renormalised over
/// the truncated range.
std::vector<double> pair_weights(const SourceParams& p, int max_pairs);

/// The source's four modes in order (795 e, 795 ℓ, 1533 e, 1533 ℓ) with the
/// given spatial labels.
std::vector<ModeLabel> source_modes(Spatial s795, Spatial s1533);

/// One pure piece of a source's output: `weight` is its probability and
/// `state` is normalised.
struct SourceComponent {
  int pairs = 0;
  double weight = 0.0;
  FockState state;
};

/// Source output as an incoherent mixture. `truncation` counts photons (2 per
/// pair) and must be ≥ 2. The n-pair sector is the normalised K^n|0⟩ with
/// K = a_e†b_e† + e^{iθ} a_ℓ†b_ℓ†; the one-pair sector carries the noise
/// channel that sets its fidelity with the ideal Bell ket.
std::vector<SourceComponent> spdc_state(const SourceParams& p, int truncation,
                                        Spatial s795 = Spatial::A, Spatial s1533 = Spatial::B);

/// Two-qubit state of the one-pair sector, qubit order (795, 1533).
DensityMatrix one_pair_density(const SourceParams& p);

/// Reads the one-pair qubit state off a source's components (oracle for
/// `one_pair_density`).
DensityMatrix one_pair_sector(const std::vector<SourceComponent>& components);

struct AnalyzerSetting {
  Projector::Basis basis = Projector::Basis::Z;
  double phi = 0.0;

  static AnalyzerSetting z() { return {Projector::Basis::Z, 0.0}; }
  /// Throws std::invalid_argument for φ outside [0, 2π).
  static AnalyzerSetting phase(double phi);
};

/// Output mode images of the analyzer on one side, indexed [input bin].
/// Outputs are (port, bin) with port 0 = "+" and 1 = "−", bins 0..2, flattened
/// as port*3 + bin. Z: e → (+,0), ℓ → (+,1). Phase:
///   e → ½[(+,0) + (−,0) + (+,1) − (−,1)]
///   ℓ → ½[e^{−iφ}((+,1) + (−,1)) + (+,2) − (−,2)]
/// so a middle-bin click on "+" projects onto (|e⟩ + e^{iφ}|ℓ⟩)/√2 with weight ½.
std::array<std::vector<std::pair<std::size_t, Complex>>, 2> analyzer_images(const AnalyzerSetting& s);

/// Index (into the 6 analyzer outputs) of the two pixels that realise the
/// setting's projectors: Z → (early, late); Phase → (+ middle, − middle).
std::array<std::size_t, 2> analyzer_outcome_pixels(const AnalyzerSetting& s);

enum class Side { A, D };

struct AnalyzerOutput {
  FockState state;
  /// Mode indices in `state` of the two outcome pixels.
  std::array<std::size_t, 2> outcome_modes{};
};

/// Runs the 795 nm photon on one side through its analyzer. The side's two
/// input modes are replaced by six output modes appended at the end.
AnalyzerOutput analyzer(const FockState& state, Side side, const AnalyzerSetting& s);

/// Images of a BSM input photon in bin t: common-slot amplitude overlap^{1/4}
/// and own-slot amplitude √(1−√overlap), each split 50/50. Input B maps to
/// (p1 + p2)/√2, input C to (p1 − p2)/√2. Outputs flattened as
/// port*6 + bin*3 + slot.
std::vector<std::pair<std::size_t, Complex>> bsm_images(bool from_c, int bin, double overlap);

/// Interferes the 1533 nm B and C modes of `state` on the BSM beam splitter.
/// B/C input modes are replaced by the 12 slot-resolved outputs appended at
/// the end.
FockState bsm_interfere(const FockState& state, double overlap);

}  // namespace swapsim
