#include "swapsim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "swapsim/error.hpp"

namespace swapsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::optional<std::size_t> find_mode(const std::vector<ModeLabel>& modes, Wavelength w, Spatial s,
                                     int temporal) {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& m = modes[i];
    if (m.wavelength == w && m.spatial == s && m.temporal == temporal && m.slot == OverlapSlot::Common) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t require_mode(const std::vector<ModeLabel>& modes, Wavelength w, Spatial s, int temporal,
                         const char* where) {
  const auto m = find_mode(modes, w, s, temporal);
  if (!m) {
    ModeLabel want{w, s, temporal, OverlapSlot::Common};
    throw DimensionError(std::string(where) + ": state has no mode " + want.to_string());
  }
  return *m;
}

/// Identity on every mode except `replaced`, whose images are filled in by the
/// caller; new outputs are appended after the surviving modes.
struct Rewire {
  LinearMap map;
  std::vector<std::size_t> new_index;  // old mode -> output index (unused for replaced)
};

Rewire rewire(const std::vector<ModeLabel>& modes, const std::vector<std::size_t>& replaced,
              const std::vector<ModeLabel>& appended) {
  Rewire r;
  r.new_index.assign(modes.size(), 0);
  r.map.images.resize(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (std::find(replaced.begin(), replaced.end(), i) != replaced.end()) continue;
    r.new_index[i] = r.map.outputs.size();
    r.map.images[i] = {{r.map.outputs.size(), Complex(1.0)}};
    r.map.outputs.push_back(modes[i]);
  }
  for (const auto& m : appended) r.map.outputs.push_back(m);
  return r;
}

}  // namespace

void SourceParams::validate() const {
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("SourceParams: mu must lie in [0, 1)");
  if (!(state_fidelity >= 0.0 && state_fidelity <= 1.0)) {
    throw std::invalid_argument("SourceParams: state_fidelity must lie in [0, 1]");
  }
  const double floor = noise == SourceNoise::Depolarizing ? 0.25 : 0.5;
  if (state_fidelity < floor) {
    throw std::invalid_argument("SourceParams: state_fidelity below what the noise channel can reach");
  }
}

std::vector<double> pair_weights(const SourceParams& p, int max_pairs) {
  p.validate();
  if (max_pairs < 0) throw std::invalid_argument("pair_weights: max_pairs must be nonnegative");
  std::vector<double> w(static_cast<std::size_t>(max_pairs) + 1);
  for (int n = 0; n <= max_pairs; ++n) {
    if (p.statistics == PairStatistics::Thermal) {
      w[static_cast<std::size_t>(n)] = std::pow(p.mu, n) / std::pow(1.0 + p.mu, n + 1);
    } else {
      w[static_cast<std::size_t>(n)] = std::exp(-p.mu + n * std::log(std::max(p.mu, 1e-300)) - std::lgamma(n + 1.0));
      if (p.mu == 0.0) w[static_cast<std::size_t>(n)] = n == 0 ? 1.0 : 0.0;
    }
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

std::vector<ModeLabel> source_modes(Spatial s795, Spatial s1533) {
  return {
      {Wavelength::Nm795, s795, 0, OverlapSlot::Common},
      {Wavelength::Nm795, s795, 1, OverlapSlot::Common},
      {Wavelength::Nm1533, s1533, 0, OverlapSlot::Common},
      {Wavelength::Nm1533, s1533, 1, OverlapSlot::Common},
  };
}

std::vector<SourceComponent> spdc_state(const SourceParams& p, int truncation, Spatial s795,
                                        Spatial s1533) {
  if (truncation < 2) throw std::invalid_argument("spdc_state: truncation must allow at least one pair");
  const int max_pairs = truncation / 2;
  const auto weights = pair_weights(p, max_pairs);
  const auto modes = source_modes(s795, s1533);
  const Complex rel = std::polar(1.0, p.phase);

  auto pair_term = [&](int t, int u, Complex c) {
    return std::pair<std::vector<ModeIndex>, Complex>{
        {static_cast<ModeIndex>(t), static_cast<ModeIndex>(2 + u)}, c};
  };
  const FockState k = FockState::from_creation_terms(modes, {pair_term(0, 0, 1.0), pair_term(1, 1, rel)});

  std::vector<SourceComponent> out;
  FockState power(modes);
  for (int n = 0; n <= max_pairs; ++n) {
    if (n > 0) power = power.product(k);
    const double w = weights[static_cast<std::size_t>(n)];
    if (w <= 0.0) continue;
    const FockState normalised = power.scaled(1.0 / std::sqrt(power.norm_squared()));
    if (n != 1 || p.state_fidelity == 1.0) {
      out.push_back({n, w, normalised});
      continue;
    }
    auto product_state = [&](int t, int u) {
      return FockState::from_creation_terms(modes, {pair_term(t, u, 1.0)});
    };
    if (p.noise == SourceNoise::Depolarizing) {
      const double keep = (4.0 * p.state_fidelity - 1.0) / 3.0;
      if (keep > 0.0) out.push_back({1, w * keep, normalised});
      for (int t = 0; t < 2; ++t) {
        for (int u = 0; u < 2; ++u) out.push_back({1, w * (1.0 - keep) / 4.0, product_state(t, u)});
      }
    } else {
      const double keep = 2.0 * p.state_fidelity - 1.0;
      if (keep > 0.0) out.push_back({1, w * keep, normalised});
      out.push_back({1, w * (1.0 - keep) / 2.0, product_state(0, 0)});
      out.push_back({1, w * (1.0 - keep) / 2.0, product_state(1, 1)});
    }
  }
  return out;
}

DensityMatrix one_pair_density(const SourceParams& p) {
  p.validate();
  CVector phi = CVector::Zero(4);
  phi(0) = kInvSqrt2;
  phi(3) = std::polar(kInvSqrt2, p.phase);
  const CMatrix ideal = phi * phi.adjoint();
  CMatrix rho;
  if (p.noise == SourceNoise::Depolarizing) {
    const double keep = (4.0 * p.state_fidelity - 1.0) / 3.0;
    rho = keep * ideal + (1.0 - keep) / 4.0 * CMatrix::Identity(4, 4);
  } else {
    const double keep = 2.0 * p.state_fidelity - 1.0;
    CMatrix diag = CMatrix::Zero(4, 4);
    diag(0, 0) = diag(3, 3) = 0.5;
    rho = keep * ideal + (1.0 - keep) * diag;
  }
  return DensityMatrix(rho);
}

DensityMatrix one_pair_sector(const std::vector<SourceComponent>& components) {
  CMatrix rho = CMatrix::Zero(4, 4);
  double total = 0.0;
  for (const auto& c : components) {
    if (c.pairs != 1) continue;
    if (c.state.mode_count() != 4) throw DimensionError("one_pair_sector: expected a four-mode source state");
    CVector psi(4);
    for (int t = 0; t < 2; ++t) {
      for (int u = 0; u < 2; ++u) {
        std::array<int, 4> occ{0, 0, 0, 0};
        occ[static_cast<std::size_t>(t)] = 1;
        occ[static_cast<std::size_t>(2 + u)] = 1;
        psi(2 * t + u) = c.state.amplitude(occ);
      }
    }
    rho += c.weight * psi * psi.adjoint();
    total += c.weight;
  }
  if (total <= 0.0) throw InvalidStateError("one_pair_sector: no one-pair component");
  return DensityMatrix(rho / total);
}

AnalyzerSetting AnalyzerSetting::phase(double phi) {
  if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("AnalyzerSetting::phase: phi must lie in [0, 2π)");
  }
  return {Projector::Basis::Phase, phi};
}

std::array<std::vector<std::pair<std::size_t, Complex>>, 2> analyzer_images(const AnalyzerSetting& s) {
  auto px = [](int port, int bin) { return static_cast<std::size_t>(port * 3 + bin); };
  if (s.basis == Projector::Basis::Z) {
    return {{{{px(0, 0), Complex(1.0)}}, {{px(0, 1), Complex(1.0)}}}};
  }
  const Complex back = 0.5 * std::polar(1.0, -s.phi);
  return {{
      {{px(0, 0), 0.5}, {px(1, 0), 0.5}, {px(0, 1), 0.5}, {px(1, 1), -0.5}},
      {{px(0, 1), back}, {px(1, 1), back}, {px(0, 2), 0.5}, {px(1, 2), -0.5}},
  }};
}

std::array<std::size_t, 2> analyzer_outcome_pixels(const AnalyzerSetting& s) {
  if (s.basis == Projector::Basis::Z) return {0, 1};
  return {1, 4};
}

AnalyzerOutput analyzer(const FockState& state, Side side, const AnalyzerSetting& s) {
  if (s.basis == Projector::Basis::Phase && !(s.phi >= 0.0 && s.phi < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("analyzer: phi must lie in [0, 2π)");
  }
  const Spatial in = side == Side::A ? Spatial::A : Spatial::D;
  const Spatial plus = side == Side::A ? Spatial::APlus : Spatial::DPlus;
  const Spatial minus = side == Side::A ? Spatial::AMinus : Spatial::DMinus;
  const auto& modes = state.modes();
  const std::size_t e = require_mode(modes, Wavelength::Nm795, in, 0, "analyzer");
  const std::size_t l = require_mode(modes, Wavelength::Nm795, in, 1, "analyzer");

  std::vector<ModeLabel> appended;
  for (int port = 0; port < 2; ++port) {
    for (int bin = 0; bin < 3; ++bin) {
      appended.push_back({Wavelength::Nm795, port == 0 ? plus : minus, bin, OverlapSlot::Common});
    }
  }
  Rewire r = rewire(modes, {e, l}, appended);
  const std::size_t base = r.map.outputs.size() - appended.size();
  const auto images = analyzer_images(s);
  for (int bin = 0; bin < 2; ++bin) {
    auto& dst = r.map.images[bin == 0 ? e : l];
    for (const auto& [o, c] : images[static_cast<std::size_t>(bin)]) dst.emplace_back(base + o, c);
  }
  const auto pix = analyzer_outcome_pixels(s);
  return {state.apply_linear(r.map), {base + pix[0], base + pix[1]}};
}

std::vector<std::pair<std::size_t, Complex>> bsm_images(bool from_c, int bin, double overlap) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("bsm_images: overlap outside [0, 1]");
  if (bin < 0 || bin > 1) throw std::invalid_argument("bsm_images: bin must be 0 or 1");
  const double common = std::pow(overlap, 0.25);
  const double own = std::sqrt(std::max(0.0, 1.0 - std::sqrt(overlap)));
  const std::size_t own_slot = from_c ? 2 : 1;
  const double sign = from_c ? -1.0 : 1.0;
  auto idx = [bin](int port, std::size_t slot) { return static_cast<std::size_t>(port * 6 + bin * 3) + slot; };
  std::vector<std::pair<std::size_t, Complex>> out;
  for (const auto& [slot, amp] : {std::pair{std::size_t{0}, common}, std::pair{own_slot, own}}) {
    if (amp == 0.0) continue;
    out.emplace_back(idx(0, slot), amp * kInvSqrt2);
    out.emplace_back(idx(1, slot), sign * amp * kInvSqrt2);
  }
  return out;
}

FockState bsm_interfere(const FockState& state, double overlap) {
  const auto& modes = state.modes();
  std::array<std::size_t, 2> b{}, c{};
  for (int t = 0; t < 2; ++t) {
    b[static_cast<std::size_t>(t)] = require_mode(modes, Wavelength::Nm1533, Spatial::B, t, "bsm_interfere");
    c[static_cast<std::size_t>(t)] = require_mode(modes, Wavelength::Nm1533, Spatial::C, t, "bsm_interfere");
  }
  std::vector<ModeLabel> appended;
  for (int port = 0; port < 2; ++port) {
    for (int bin = 0; bin < 2; ++bin) {
      for (auto slot : {OverlapSlot::Common, OverlapSlot::DistinctB, OverlapSlot::DistinctC}) {
        appended.push_back({Wavelength::Nm1533, port == 0 ? Spatial::BsmOut1 : Spatial::BsmOut2, bin, slot});
      }
    }
  }
  Rewire r = rewire(modes, {b[0], b[1], c[0], c[1]}, appended);
  const std::size_t base = r.map.outputs.size() - appended.size();
  for (int t = 0; t < 2; ++t) {
    for (bool from_c : {false, true}) {
      auto& dst = r.map.images[from_c ? c[static_cast<std::size_t>(t)] : b[static_cast<std::size_t>(t)]];
      for (const auto& [o, amp] : bsm_images(from_c, t, overlap)) dst.emplace_back(base + o, amp);
    }
  }
  return state.apply_linear(r.map);
}

}  // namespace swapsim
