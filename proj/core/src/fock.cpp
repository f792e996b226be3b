#include "swapsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swapsim/error.hpp"

namespace swapsim {

namespace {

const char* spatial_name(Spatial s) {
  switch (s) {
    case Spatial::A:
      return "A";
    case Spatial::B:
      return "B";
    case Spatial::C:
      return "C";
    case Spatial::D:
      return "D";
    case Spatial::BsmOut1:
      return "BSM1";
    case Spatial::BsmOut2:
      return "BSM2";
    case Spatial::APlus:
      return "A+";
    case Spatial::AMinus:
      return "A-";
    case Spatial::DPlus:
      return "D+";
    case Spatial::DMinus:
      return "D-";
    case Spatial::Environment:
      return "env";
  }
  return "?";
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_mode(const FockState& s, std::size_t mode, const char* where) {
  if (mode >= s.mode_count()) throw DimensionError(std::string(where) + ": mode index out of range");
}

}  // namespace

std::string ModeLabel::to_string() const {
  std::ostringstream os;
  os << (wavelength == Wavelength::Nm795 ? "795" : "1533") << ':' << spatial_name(spatial) << ':'
     << (temporal == 0 ? "e" : temporal == 1 ? "l" : "3");
  if (slot != OverlapSlot::Common) os << (slot == OverlapSlot::DistinctB ? ":sB" : ":sC");
  return os.str();
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::from_modes(std::span<const ModeIndex> modes) {
  if (modes.size() > kMaxPhotons) throw DimensionError("Monomial: too many photons for truncation");
  Monomial m;
  std::copy(modes.begin(), modes.end(), m.m_.begin());
  m.n_ = static_cast<std::uint8_t>(modes.size());
  std::sort(m.m_.begin(), m.m_.begin() + m.n_);
  return m;
}

int Monomial::count(ModeIndex mode) const {
  return static_cast<int>(std::count(m_.begin(), m_.begin() + n_, mode));
}

Monomial Monomial::times(const Monomial& other) const {
  if (n_ + other.n_ > kMaxPhotons) throw DimensionError("Monomial: too many photons for truncation");
  Monomial out;
  std::merge(m_.begin(), m_.begin() + n_, other.m_.begin(), other.m_.begin() + other.n_,
             out.m_.begin());
  out.n_ = static_cast<std::uint8_t>(n_ + other.n_);
  return out;
}

Monomial Monomial::times(ModeIndex mode) const {
  if (n_ + 1u > kMaxPhotons) throw DimensionError("Monomial: too many photons for truncation");
  Monomial out;
  auto* pos = std::upper_bound(m_.begin(), m_.begin() + n_, mode);
  auto* dst = std::copy(m_.begin(), pos, out.m_.begin());
  *dst++ = mode;
  std::copy(pos, m_.begin() + n_, dst);
  out.n_ = static_cast<std::uint8_t>(n_ + 1);
  return out;
}

Monomial Monomial::without(ModeIndex mode) const {
  Monomial out;
  auto* end = std::remove_copy(m_.begin(), m_.begin() + n_, out.m_.begin(), mode);
  out.n_ = static_cast<std::uint8_t>(end - out.m_.begin());
  return out;
}

double Monomial::factorial_weight() const {
  double w = 1.0;
  int run = 1;
  for (std::size_t i = 1; i < n_; ++i) {
    if (m_[i] == m_[i - 1]) {
      ++run;
      w *= run;
    } else {
      run = 1;
    }
  }
  return w;
}

std::vector<int> Monomial::occupation(std::size_t mode_count) const {
  std::vector<int> occ(mode_count, 0);
  for (std::size_t i = 0; i < n_; ++i) ++occ.at(m_[i]);
  return occ;
}

bool Monomial::operator==(const Monomial& o) const {
  return n_ == o.n_ && std::equal(m_.begin(), m_.begin() + n_, o.m_.begin());
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  // FNV-1a over the occupied prefix.
  std::uint64_t h = 1469598103934665603ull ^ m.n_;
  for (std::size_t i = 0; i < m.n_; ++i) {
    h ^= m.m_[i];
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// LinearMap

LinearMap LinearMap::identity(const std::vector<ModeLabel>& modes) {
  LinearMap map;
  map.outputs = modes;
  map.images.resize(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) map.images[i] = {{i, Complex(1.0)}};
  return map;
}

// ---------------------------------------------------------------------------
// FockState

FockState::FockState(std::vector<ModeLabel> modes) : modes_(std::move(modes)) {
  if (modes_.size() > kMaxModes) throw DimensionError("FockState: too many modes");
  coeffs_.emplace(Monomial{}, Complex(1.0));
}

FockState::FockState(std::vector<ModeLabel> modes, Poly coeffs)
    : modes_(std::move(modes)), coeffs_(std::move(coeffs)) {}

FockState FockState::from_creation_terms(
    std::vector<ModeLabel> modes, const std::vector<std::pair<std::vector<ModeIndex>, Complex>>& terms) {
  if (modes.size() > kMaxModes) throw DimensionError("FockState: too many modes");
  Poly poly;
  for (const auto& [photons, c] : terms) {
    for (ModeIndex m : photons) {
      if (m >= modes.size()) throw DimensionError("FockState: creation term uses unknown mode");
    }
    poly[Monomial::from_modes(photons)] += c;
  }
  std::erase_if(poly, [](const auto& kv) { return kv.second == Complex(0.0); });
  return FockState(std::move(modes), std::move(poly));
}

FockState FockState::basis(std::vector<ModeLabel> modes, std::span<const int> occupation) {
  if (occupation.size() != modes.size()) throw DimensionError("FockState::basis: occupation size");
  std::vector<ModeIndex> photons;
  double w = 1.0;
  for (std::size_t m = 0; m < occupation.size(); ++m) {
    for (int k = 0; k < occupation[m]; ++k) photons.push_back(static_cast<ModeIndex>(m));
    w *= factorial(occupation[m]);
  }
  return from_creation_terms(std::move(modes), {{photons, Complex(1.0 / std::sqrt(w))}});
}

std::size_t FockState::max_photons() const {
  std::size_t n = 0;
  for (const auto& kv : coeffs_) n = std::max(n, kv.first.size());
  return n;
}

Complex FockState::amplitude(std::span<const int> occupation) const {
  if (occupation.size() != modes_.size()) throw DimensionError("FockState::amplitude: occupation size");
  std::vector<ModeIndex> photons;
  for (std::size_t m = 0; m < occupation.size(); ++m) {
    for (int k = 0; k < occupation[m]; ++k) photons.push_back(static_cast<ModeIndex>(m));
  }
  const auto mono = Monomial::from_modes(photons);
  const auto it = coeffs_.find(mono);
  if (it == coeffs_.end()) return 0.0;
  return it->second * std::sqrt(mono.factorial_weight());
}

double FockState::norm_squared() const {
  double s = 0.0;
  for (const auto& [mono, c] : coeffs_) s += std::norm(c) * mono.factorial_weight();
  return s;
}

double FockState::mean_photons(std::size_t mode) const {
  check_mode(*this, mode, "mean_photons");
  double s = 0.0;
  const auto m = static_cast<ModeIndex>(mode);
  for (const auto& [mono, c] : coeffs_) s += std::norm(c) * mono.factorial_weight() * mono.count(m);
  return s;
}

std::vector<double> FockState::photon_number_distribution(std::size_t mode) const {
  check_mode(*this, mode, "photon_number_distribution");
  std::vector<double> dist(max_photons() + 1, 0.0);
  const auto m = static_cast<ModeIndex>(mode);
  for (const auto& [mono, c] : coeffs_) {
    dist[static_cast<std::size_t>(mono.count(m))] += std::norm(c) * mono.factorial_weight();
  }
  return dist;
}

FockState FockState::apply_linear(const LinearMap& map) const {
  if (map.images.size() != modes_.size()) {
    throw DimensionError("apply_linear: map does not cover every input mode");
  }
  if (map.outputs.size() > kMaxModes) throw DimensionError("apply_linear: too many output modes");
  for (const auto& img : map.images) {
    for (const auto& [o, c] : img) {
      if (o >= map.outputs.size()) throw DimensionError("apply_linear: image uses unknown output mode");
    }
  }

  // Substitute one input mode at a time; output photons are tracked with an
  // offset so they never collide with pending input indices.
  const std::size_t offset = modes_.size();
  if (offset + map.outputs.size() > 255) throw DimensionError("apply_linear: mode index overflow");

  Poly current = coeffs_;
  for (std::size_t in = 0; in < modes_.size(); ++in) {
    const auto in_idx = static_cast<ModeIndex>(in);
    Poly next;
    next.reserve(current.size() * 2);
    for (const auto& [mono, c] : current) {
      const int n = mono.count(in_idx);
      if (n == 0) {
        next[mono] += c;
        continue;
      }
      Poly partial{{mono.without(in_idx), c}};
      for (int k = 0; k < n; ++k) {
        Poly grown;
        grown.reserve(partial.size() * map.images[in].size());
        for (const auto& [pm, pc] : partial) {
          for (const auto& [o, u] : map.images[in]) {
            grown[pm.times(static_cast<ModeIndex>(offset + o))] += pc * u;
          }
        }
        partial = std::move(grown);
      }
      for (const auto& [pm, pc] : partial) next[pm] += pc;
    }
    current = std::move(next);
  }

  Poly out;
  out.reserve(current.size());
  for (const auto& [mono, c] : current) {
    if (std::norm(c) < 1e-300) continue;
    std::array<ModeIndex, kMaxPhotons> shifted{};
    for (std::size_t i = 0; i < mono.size(); ++i) shifted[i] = static_cast<ModeIndex>(mono[i] - offset);
    out[Monomial::from_modes(std::span<const ModeIndex>(shifted.data(), mono.size()))] += c;
  }
  return FockState(map.outputs, std::move(out));
}

FockState FockState::product(const FockState& other) const {
  if (other.modes_ != modes_) throw DimensionError("FockState::product: mode sets differ");
  Poly out;
  out.reserve(coeffs_.size() * other.coeffs_.size());
  for (const auto& [ma, ca] : coeffs_) {
    for (const auto& [mb, cb] : other.coeffs_) out[ma.times(mb)] += ca * cb;
  }
  return FockState(modes_, std::move(out));
}

FockState FockState::scaled(Complex factor) const {
  Poly out = coeffs_;
  for (auto& kv : out) kv.second *= factor;
  return FockState(modes_, std::move(out));
}

// ---------------------------------------------------------------------------
// FockMixture

double FockMixture::total_weight() const {
  double w = 0.0;
  for (const auto& b : branches) w += b.norm_squared();
  return w;
}

double FockMixture::mean_photons(std::size_t mode) const {
  double s = 0.0;
  for (const auto& b : branches) s += b.mean_photons(mode);
  return s;
}

std::vector<double> FockMixture::photon_number_distribution(std::size_t mode) const {
  std::vector<double> dist;
  for (const auto& b : branches) {
    const auto d = b.photon_number_distribution(mode);
    if (d.size() > dist.size()) dist.resize(d.size(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) dist[i] += d[i];
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Linear-optics operations

FockState beam_splitter(const FockState& state, std::size_t mode_a, std::size_t mode_b,
                        double reflectivity) {
  check_mode(state, mode_a, "beam_splitter");
  check_mode(state, mode_b, "beam_splitter");
  if (mode_a == mode_b) throw std::invalid_argument("beam_splitter: modes must differ");
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
    throw std::invalid_argument("beam_splitter: reflectivity outside [0, 1]");
  }
  const auto& la = state.modes()[mode_a];
  const auto& lb = state.modes()[mode_b];
  if (la.wavelength != lb.wavelength || la.temporal != lb.temporal || la.slot != lb.slot) {
    throw std::invalid_argument("beam_splitter: modes " + la.to_string() + " and " + lb.to_string() +
                                " cannot interfere");
  }
  const double r = std::sqrt(reflectivity);
  const double t = std::sqrt(1.0 - reflectivity);
  LinearMap map = LinearMap::identity(state.modes());
  map.images[mode_a] = {{mode_a, t}, {mode_b, r}};
  map.images[mode_b] = {{mode_a, r}, {mode_b, -t}};
  return state.apply_linear(map);
}

FockMixture apply_loss(const FockState& state, std::size_t mode, double transmission) {
  check_mode(state, mode, "apply_loss");
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw std::invalid_argument("apply_loss: transmission outside [0, 1]");
  }
  // Append an environment mode, mix, then split by environment photon number.
  std::vector<ModeLabel> extended = state.modes();
  ModeLabel env = extended[mode];
  env.spatial = Spatial::Environment;
  extended.push_back(env);
  const std::size_t env_idx = extended.size() - 1;

  LinearMap map = LinearMap::identity(state.modes());
  map.outputs = extended;
  map.images[mode] = {{mode, std::sqrt(transmission)}, {env_idx, std::sqrt(1.0 - transmission)}};
  const FockState mixed = state.apply_linear(map);

  const auto env_m = static_cast<ModeIndex>(env_idx);
  std::vector<std::vector<std::pair<std::vector<ModeIndex>, Complex>>> by_lost;
  mixed.for_each_amplitude([&](const Monomial& mono, Complex amp) {
    const int lost = mono.count(env_m);
    if (by_lost.size() <= static_cast<std::size_t>(lost)) by_lost.resize(static_cast<std::size_t>(lost) + 1);
    const Monomial kept = mono.without(env_m);
    // Re-express as a creation coefficient over the kept modes.
    std::vector<ModeIndex> photons(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) photons[i] = kept[i];
    by_lost[static_cast<std::size_t>(lost)].emplace_back(photons, amp / std::sqrt(kept.factorial_weight()));
  });

  FockMixture out;
  for (auto& terms : by_lost) {
    if (terms.empty()) continue;
    out.branches.push_back(FockState::from_creation_terms(state.modes(), terms));
  }
  return out;
}

FockMixture apply_loss(const FockMixture& state, std::size_t mode, double transmission) {
  FockMixture out;
  for (const auto& b : state.branches) {
    auto part = apply_loss(b, mode, transmission);
    for (auto& br : part.branches) out.branches.push_back(std::move(br));
  }
  return out;
}

}  // namespace swapsim
