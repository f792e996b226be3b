#pragma once

// Threshold detectors on a fixed 16-pixel layout and BSM click classification.
//
// Pixel layout (one pixel = one detector in one time bin):
//   0..5    side A analyzer, port*3 + bin (port 0 = "+", bins 0..2)
//   6..11   side D analyzer, same ordering
//   12..15  BSM, 12 + port*2 + bin (bins 0..1)

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>

namespace swapsim {

inline constexpr std::size_t kPixels = 16;
inline constexpr std::size_t kBsmPixel0 = 12;

using Occupancy = std::array<std::uint8_t, kPixels>;
using ClickMask = std::uint16_t;
using Rng = std::mt19937_64;

struct DetectorParams {
  double efficiency = 1.0;
  double dark_rate_hz = 0.0;
  double window_s = 1.4e-9;
  /// Probability of landing in each neighbouring bin; a shift past the edge
  /// of the recorded bins is lost.
  double misbin_prob = 0.0;
  bool number_resolving = false;

  void validate() const;
};

/// One-sided Gaussian tail of the timing jitter beyond half the bin spacing.
double misbin_probability(double jitter_fwhm_s, double bin_separation_s);

/// Per-bin dark-count probability dark_rate · window.
double dark_probability(const DetectorParams& d);

/// Response of the whole pixel array. `response[p][r]` is the probability that
/// one photon arriving in pixel p is registered in pixel r; rows may sum to
/// less than one (loss). `dark[r]` is the dark-click probability of pixel r.
struct DetectionModel {
  std::array<std::array<double, kPixels>, kPixels> response{};
  std::array<double, kPixels> dark{};
};

/// Builds the response from per-side detector settings. `transmission_*`
/// multiplies the detector efficiency for photons reaching that group of
/// pixels, which is equivalent to loss ahead of the (linear) optics because it
/// is uniform across each group.
DetectionModel make_detection_model(const DetectorParams& det795, double transmission_795,
                                    const DetectorParams& det1533, double transmission_1533);

/// Samples one click pattern for the given photon occupancy.
ClickMask detect(const Occupancy& occ, const DetectionModel& model, Rng& rng);

enum class BsmOutcome { Fail, PsiMinus, PsiPlus };

const char* to_string(BsmOutcome o);

/// Classifies the four BSM pixels given as bits (port1 e, port1 ℓ, port2 e,
/// port2 ℓ) = (1, 2, 4, 8).
BsmOutcome bsm_classify(unsigned bsm_bits, bool accept_psi_plus);

/// Convenience: classify from a full pixel mask.
inline BsmOutcome bsm_classify_mask(ClickMask clicks, bool accept_psi_plus) {
  return bsm_classify((clicks >> kBsmPixel0) & 0xFu, accept_psi_plus);
}

}  // namespace swapsim
