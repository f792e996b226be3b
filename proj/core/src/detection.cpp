#include "swapsim/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace swapsim {

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

/// Fills the response of one detector spanning pixels base..base+bins-1.
void fill_detector(DetectionModel& m, std::size_t base, int bins, double eff, double misbin, double dark) {
  for (int b = 0; b < bins; ++b) {
    const std::size_t p = base + static_cast<std::size_t>(b);
    m.response[p][p] = eff * (1.0 - 2.0 * misbin);
    if (b > 0) m.response[p][p - 1] = eff * misbin;
    if (b + 1 < bins) m.response[p][p + 1] = eff * misbin;
    m.dark[p] = dark;
  }
}

}  // namespace

void DetectorParams::validate() const {
  if (!is_probability(efficiency)) throw std::invalid_argument("DetectorParams: efficiency outside [0, 1]");
  if (!(dark_rate_hz >= 0.0)) throw std::invalid_argument("DetectorParams: negative dark rate");
  if (!(window_s >= 0.0)) throw std::invalid_argument("DetectorParams: negative window");
  if (!(misbin_prob >= 0.0 && misbin_prob <= 0.5)) {
    throw std::invalid_argument("DetectorParams: misbin probability outside [0, 0.5]");
  }
  if (!is_probability(dark_rate_hz * window_s)) {
    throw std::invalid_argument("DetectorParams: dark probability per bin exceeds 1");
  }
  if (number_resolving) throw std::invalid_argument("DetectorParams: number-resolving detectors are not modelled");
}

double misbin_probability(double jitter_fwhm_s, double bin_separation_s) {
  if (!(jitter_fwhm_s >= 0.0) || !(bin_separation_s > 0.0)) {
    throw std::invalid_argument("misbin_probability: jitter must be ≥ 0 and bin separation > 0");
  }
  if (jitter_fwhm_s == 0.0) return 0.0;
  const double sigma = jitter_fwhm_s / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  return 0.5 * std::erfc(0.5 * bin_separation_s / (sigma * std::sqrt(2.0)));
}

double dark_probability(const DetectorParams& d) { return d.dark_rate_hz * d.window_s; }

DetectionModel make_detection_model(const DetectorParams& det795, double transmission_795,
                                    const DetectorParams& det1533, double transmission_1533) {
  det795.validate();
  det1533.validate();
  if (!is_probability(transmission_795) || !is_probability(transmission_1533)) {
    throw std::invalid_argument("make_detection_model: transmission outside [0, 1]");
  }
  DetectionModel m;
  const double e795 = det795.efficiency * transmission_795;
  const double e1533 = det1533.efficiency * transmission_1533;
  for (std::size_t side = 0; side < 2; ++side) {
    for (std::size_t port = 0; port < 2; ++port) {
      fill_detector(m, side * 6 + port * 3, 3, e795, det795.misbin_prob, dark_probability(det795));
    }
  }
  for (std::size_t port = 0; port < 2; ++port) {
    fill_detector(m, kBsmPixel0 + port * 2, 2, e1533, det1533.misbin_prob, dark_probability(det1533));
  }
  return m;
}

ClickMask detect(const Occupancy& occ, const DetectionModel& model, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ClickMask clicks = 0;
  for (std::size_t p = 0; p < kPixels; ++p) {
    for (int k = 0; k < occ[p]; ++k) {
      double u = u01(rng);
      for (std::size_t r = 0; r < kPixels; ++r) {
        const double q = model.response[p][r];
        if (q == 0.0) continue;
        if (u < q) {
          clicks |= static_cast<ClickMask>(1u << r);
          break;
        }
        u -= q;
      }
    }
  }
  for (std::size_t r = 0; r < kPixels; ++r) {
    if (model.dark[r] > 0.0 && u01(rng) < model.dark[r]) clicks |= static_cast<ClickMask>(1u << r);
  }
  return clicks;
}

const char* to_string(BsmOutcome o) {
  switch (o) {
    case BsmOutcome::Fail:
      return "fail";
    case BsmOutcome::PsiMinus:
      return "PsiMinus";
    case BsmOutcome::PsiPlus:
      return "PsiPlus";
  }
  return "?";
}

BsmOutcome bsm_classify(unsigned bits, bool accept_psi_plus) {
  const unsigned port1 = bits & 0x3u;
  const unsigned port2 = (bits >> 2) & 0x3u;
  // One click per port in opposite bins.
  if ((port1 == 0x1u && port2 == 0x2u) || (port1 == 0x2u && port2 == 0x1u)) return BsmOutcome::PsiMinus;
  // Both bins on one port, nothing on the other.
  if (accept_psi_plus && ((port1 == 0x3u && port2 == 0) || (port1 == 0 && port2 == 0x3u))) {
    return BsmOutcome::PsiPlus;
  }
  return BsmOutcome::Fail;
}

}  // namespace swapsim
