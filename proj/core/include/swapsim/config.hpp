#pragma once

// Bench description loaded from an INI file. Schema (section.key):
//
//   [source_ab] / [source_cd]
//     mu              mean pairs per qubit, [0, 1)
//     phase           relative phase of the |ll> term, radians
//     state_fidelity  one-pair fidelity with the ideal Bell ket
//     statistics      thermal | poissonian              (default thermal)
//     noise           depolarizing | dephasing           (default depolarizing)
//     truncation      max photons per source, >= 2       (default 4)
//   [channels]
//     transmission_795, transmission_1533   source-to-detector transmission
//   [bsm]
//     overlap           squared spectral overlap of the 1533 nm photons
//     accept_psi_plus   also herald on the Psi+ pattern  (default false)
//   [detectors_795] / [detectors_1533]
//     efficiency, dark_rate_hz, jitter_fwhm_ps, window_ns
//   [timing]
//     bin_separation_ns
//   [heralding]
//     pump_bandwidth_ghz, filter_795_ghz, filter_1533_ghz
//     loss_795, loss_1533          comma-separated factors in [0, 1]
//     measured_795, measured_1533  measured heralding efficiencies
//   [spectrum]
//     signal_wavelength_nm, signal_bandwidth_nm, pump_wavelength_nm,
//     pump_duration_ps, coherence_time_ps
//     pump_convolution   include pump width in the idler width (default true)
//   [run]
//     pulses, seed
//
// Unknown sections or keys are rejected; errors name the dotted field path.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "swapsim/detection.hpp"
#include "swapsim/optics.hpp"

namespace swapsim {

struct DetectorConfig {
  double efficiency = 1.0;
  double dark_rate_hz = 0.0;
  double jitter_fwhm_ps = 0.0;
  double window_ns = 1.4;
};

struct HeraldingConfig {
  double pump_bandwidth_ghz = 24.4;
  double filter_795_ghz = 6.0;
  double filter_1533_ghz = 12.0;
  std::vector<double> loss_795;
  std::vector<double> loss_1533;
  double measured_795 = 0.0;
  double measured_1533 = 0.0;
};

struct SpectrumConfig {
  double signal_wavelength_nm = 795.0;
  double signal_bandwidth_nm = 1.5;
  double pump_wavelength_nm = 523.5;
  double pump_duration_ps = 18.0;
  double coherence_time_ps = 37.0;
  bool pump_convolution = true;
};

struct ExperimentConfig {
  SourceParams source_ab;
  SourceParams source_cd;
  int truncation = 4;
  double transmission_795 = 1.0;
  double transmission_1533 = 1.0;
  double overlap = 1.0;
  bool accept_psi_plus = false;
  DetectorConfig detectors_795;
  DetectorConfig detectors_1533;
  double bin_separation_ns = 1.4;
  HeraldingConfig heralding;
  SpectrumConfig spectrum;
  std::uint64_t pulses = 1000000;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  DetectorParams detector_params_795() const;
  DetectorParams detector_params_1533() const;
  DetectionModel detection_model() const;

  /// Canonical text rendering used for hashing and manifests.
  std::string canonical() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Parameters of the published bench: μ = 0.191, ξ² = 0.89, source fidelity
/// 0.95, heralding 1.96 % / 5.8 %.
ExperimentConfig paper_config();

/// Noise-free bench: unit efficiencies, no darks, perfect overlap, μ → 0.
ExperimentConfig ideal_config();

/// FNV-1a 64-bit hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace swapsim
