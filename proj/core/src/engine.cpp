#include "swapsim/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "swapsim/error.hpp"

namespace swapsim {

namespace {


std::vector<ModeLabel> output_modes() {
  std::vector<ModeLabel> out;
  for (auto [plus, minus] : {std::pair{Spatial::APlus, Spatial::AMinus}, std::pair{Spatial::DPlus, Spatial::DMinus}}) {
    for (int port = 0; port < 2; ++port) {
      for (int bin = 0; bin < 3; ++bin) {
        out.push_back({Wavelength::Nm795, port == 0 ? plus : minus, bin, OverlapSlot::Common});
      }
    }
  }
  for (int port = 0; port < 2; ++port) {
    for (int bin = 0; bin < 2; ++bin) {
      for (auto slot : {OverlapSlot::Common, OverlapSlot::DistinctB, OverlapSlot::DistinctC}) {
        out.push_back({Wavelength::Nm1533, port == 0 ? Spatial::BsmOut1 : Spatial::BsmOut2, bin, slot});
      }
    }
  }
  return out;
}

std::size_t pixel_of_output(std::size_t mode) {
  if (mode < kBsmPixel0) return mode;
  const std::size_t m = mode - kBsmPixel0;
  const std::size_t port = m / 6;
  const std::size_t bin = (m % 6) / 3;
  return kBsmPixel0 + port * 2 + bin;
}

/// Map from a source's four input modes (795 e, 795 ℓ, 1533 e, 1533 ℓ) onto
/// the shared output modes.
LinearMap source_map(const AnalyzerSetting& analyzer, std::size_t analyzer_offset, bool from_c, double overlap) {
  LinearMap map;
  map.outputs = output_modes();
  map.images.resize(4);
  const auto an = analyzer_images(analyzer);
  for (int t = 0; t < 2; ++t) {
    for (const auto& [o, c] : an[static_cast<std::size_t>(t)]) {
      map.images[static_cast<std::size_t>(t)].emplace_back(analyzer_offset + o, c);
    }
    for (const auto& [o, c] : bsm_images(from_c, t, overlap)) {
      map.images[static_cast<std::size_t>(2 + t)].emplace_back(kBsmPixel0 + o, c);
    }
  }
  return map;
}

std::uint64_t pack(const Occupancy& occ) {
  std::uint64_t key = 0;
  for (std::size_t p = 0; p < kPixels; ++p) key |= static_cast<std::uint64_t>(occ[p] & 0xFu) << (4 * p);
  return key;
}

Occupancy unpack(std::uint64_t key) {
  Occupancy occ{};
  for (std::size_t p = 0; p < kPixels; ++p) occ[p] = static_cast<std::uint8_t>((key >> (4 * p)) & 0xFu);
  return occ;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<std::uint64_t> shard_sizes(std::uint64_t pulses, unsigned workers) {
  const unsigned w = std::max(1u, workers);
  std::vector<std::uint64_t> out(w, pulses / w);
  for (std::uint64_t i = 0; i < pulses % w; ++i) ++out[i];
  return out;
}

/// Runs `fn(shard, shard_pulses)` for each shard on its own thread.
template <class F>
void for_each_shard(std::uint64_t pulses, unsigned workers, F&& fn) {
  const auto sizes = shard_sizes(pulses, workers);
  if (sizes.size() == 1) {
    fn(std::size_t{0}, sizes[0]);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(sizes.size());
  for (std::size_t s = 0; s < sizes.size(); ++s) threads.emplace_back([&, s] { fn(s, sizes[s]); });
  for (auto& t : threads) t.join();
}

/// Category counts for `probs` (indexed by relevant-pixel pattern groups).
std::vector<std::uint64_t> draw_counts(const PulseModel& model, const std::vector<double>& probs,
                                       const std::array<int, kPatterns>& category, std::uint64_t pulses,
                                       std::uint64_t seed, std::uint64_t stream, const RunOptions& opts) {
  const std::size_t ncat = probs.size();
  std::vector<std::vector<std::uint64_t>> partial(std::max(1u, opts.workers));
  for_each_shard(pulses, opts.workers, [&](std::size_t shard, std::uint64_t n) {
    Rng rng(derive_seed(seed, stream, shard));
    if (opts.mode == SamplingMode::Multinomial) {
      partial[shard] = sample_multinomial(n, probs, rng);
      return;
    }
    std::vector<std::uint64_t> counts(ncat, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
      const int pattern = model.sample_pulse(rng);
      if (pattern < 0) continue;
      const int c = category[static_cast<std::size_t>(pattern)];
      if (c >= 0) ++counts[static_cast<std::size_t>(c)];
    }
    partial[shard] = std::move(counts);
  });
  std::vector<std::uint64_t> total(ncat, 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < ncat; ++i) total[i] += p[i];
  }
  return total;
}

const char* basis_label(const AnalyzerSetting& s) { return s.basis == Projector::Basis::Z ? "Z" : "P"; }

}  // namespace

std::string SwapSetting::label() const {
  std::ostringstream os;
  os.precision(6);
  os << basis_label(a);
  if (a.basis == Projector::Basis::Phase) os << '(' << a.phi << ')';
  os << '/' << basis_label(d);
  if (d.basis == Projector::Basis::Phase) os << '(' << d.phi << ')';
  return os.str();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ull));
}

// ---------------------------------------------------------------------------
// PulseModel

PulseModel::PulseModel(const ExperimentConfig& config, const SwapSetting& setting, const EngineOptions& opts) {
  config.validate();
  const double overlap = opts.overlap_override >= 0.0 ? opts.overlap_override : config.overlap;
  if (overlap > 1.0) throw std::invalid_argument("PulseModel: overlap outside [0, 1]");
  detection_ = config.detection_model();

  const auto pa = analyzer_outcome_pixels(setting.a);
  const auto pd = analyzer_outcome_pixels(setting.d);
  relevant_ = {pa[0], pa[1], 6 + pd[0], 6 + pd[1], kBsmPixel0, kBsmPixel0 + 1, kBsmPixel0 + 2, kBsmPixel0 + 3};

  const auto comps_ab = spdc_state(config.source_ab, config.truncation, Spatial::A, Spatial::B);
  const auto comps_cd = spdc_state(config.source_cd, config.truncation, Spatial::D, Spatial::C);
  const LinearMap map_ab = source_map(setting.a, 0, false, overlap);
  const LinearMap map_cd = source_map(setting.d, 6, true, overlap);

  std::vector<FockState> out_ab, out_cd;
  for (const auto& c : comps_ab) out_ab.push_back(c.state.apply_linear(map_ab));
  for (const auto& c : comps_cd) out_cd.push_back(c.state.apply_linear(map_cd));

  std::unordered_map<std::uint64_t, double> dist;
  kept_ = 0.0;
  for (std::size_t i = 0; i < comps_ab.size(); ++i) {
    for (std::size_t j = 0; j < comps_cd.size(); ++j) {
      if (opts.qnd && (comps_ab[i].pairs > 1 || comps_cd[j].pairs > 1)) continue;
      const double w = comps_ab[i].weight * comps_cd[j].weight;
      kept_ += w;
      out_ab[i].product(out_cd[j]).for_each_amplitude([&](const Monomial& mono, Complex amp) {
        const double p = w * std::norm(amp);
        if (p == 0.0) return;
        Occupancy occ{};
        for (std::size_t k = 0; k < mono.size(); ++k) ++occ[pixel_of_output(mono[k])];
        dist[pack(occ)] += p;
      });
    }
  }

  std::vector<std::pair<std::uint64_t, double>> sorted(dist.begin(), dist.end());
  std::sort(sorted.begin(), sorted.end());
  occupancies_.reserve(sorted.size());
  cumulative_.reserve(sorted.size());
  double acc = 0.0;
  for (const auto& [key, p] : sorted) {
    occupancies_.push_back({unpack(key), p});
    acc += p;
    cumulative_.push_back(acc);
  }

  // No-click probability N(X) for every subset X of the relevant pixels.
  std::array<std::array<long double, kPatterns>, kPixels> miss{};
  for (std::size_t p = 0; p < kPixels; ++p) {
    for (std::size_t x = 0; x < kPatterns; ++x) {
      long double s = 0.0L;
      for (std::size_t b = 0; b < kRelevantPixels; ++b) {
        if (x & (1u << b)) s += detection_.response[p][relevant_[b]];
      }
      miss[p][x] = 1.0L - s;
    }
  }
  std::array<long double, kPatterns> none{};
  for (const auto& e : occupancies_) {
    for (std::size_t x = 0; x < kPatterns; ++x) {
      long double v = e.probability;
      for (std::size_t p = 0; p < kPixels; ++p) {
        for (int k = 0; k < e.occupancy[p]; ++k) v *= miss[p][x];
      }
      none[x] += v;
    }
  }
  for (std::size_t x = 0; x < kPatterns; ++x) {
    for (std::size_t b = 0; b < kRelevantPixels; ++b) {
      if (x & (1u << b)) none[x] *= 1.0L - detection_.dark[relevant_[b]];
    }
  }

  // Inclusion–exclusion: P(exactly S) = Σ_{T⊆S} (−1)^{|T|} N((R∖S) ∪ T).
  constexpr unsigned all = kPatterns - 1;
  for (unsigned s = 0; s < kPatterns; ++s) {
    long double p = 0.0L;
    for (unsigned t = s;; t = (t - 1) & s) {
      const long double term = none[(all & ~s) | t];
      p += (std::popcount(t) % 2 == 0) ? term : -term;
      if (t == 0) break;
    }
    patterns_[s] = std::max(0.0, static_cast<double>(p));
  }
}

unsigned PulseModel::relevant_pattern(ClickMask clicks) const {
  unsigned s = 0;
  for (std::size_t b = 0; b < kRelevantPixels; ++b) {
    if (clicks & (1u << relevant_[b])) s |= 1u << b;
  }
  return s;
}

std::optional<ClickMask> PulseModel::sample_clicks(Rng& rng) const {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng);
  if (u >= kept_ || occupancies_.empty()) return std::nullopt;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  const auto& occ = occupancies_[static_cast<std::size_t>(it - cumulative_.begin())].occupancy;
  return detect(occ, detection_, rng);
}

int PulseModel::sample_pulse(Rng& rng) const {
  const auto clicks = sample_clicks(rng);
  return clicks ? static_cast<int>(relevant_pattern(*clicks)) : -1;
}

// ---------------------------------------------------------------------------
// Records

std::uint64_t CoincidenceRecord::fourfold(int ia, int id, BsmOutcome bsm) const {
  if (bsm == BsmOutcome::Fail) throw std::invalid_argument("fourfold: BSM outcome must be a success");
  const auto& c = counts[bsm == BsmOutcome::PsiMinus ? 0 : 1];
  std::uint64_t n = 0;
  for (unsigned a = 0; a < 4; ++a) {
    if (!(a & (1u << ia))) continue;
    for (unsigned d = 0; d < 4; ++d) {
      if (d & (1u << id)) n += c[a][d];
    }
  }
  return n;
}

std::uint64_t CoincidenceRecord::total() const {
  std::uint64_t n = 0;
  for (const auto& b : counts) {
    for (const auto& a : b) {
      for (auto x : a) n += x;
    }
  }
  return n;
}

std::array<std::array<std::array<double, 4>, 4>, 2> record_probabilities(const PulseModel& model,
                                                                         bool accept_psi_plus) {
  std::array<std::array<std::array<double, 4>, 4>, 2> out{};
  const auto& pp = model.pattern_probabilities();
  for (unsigned s = 0; s < kPatterns; ++s) {
    const BsmOutcome o = bsm_classify(s >> 4, accept_psi_plus);
    if (o == BsmOutcome::Fail) continue;
    out[o == BsmOutcome::PsiMinus ? 0 : 1][s & 3u][(s >> 2) & 3u] += pp[s];
  }
  return out;
}

std::vector<std::uint64_t> sample_multinomial(std::uint64_t n, const std::vector<double>& probs, Rng& rng) {
  std::vector<std::uint64_t> out(probs.size(), 0);
  double mass = 1.0;
  std::uint64_t left = n;
  for (std::size_t k = 0; k < probs.size() && left > 0; ++k) {
    if (probs[k] < 0.0) throw std::invalid_argument("sample_multinomial: negative probability");
    if (probs[k] == 0.0) continue;
    const double p = mass > 0.0 ? std::clamp(probs[k] / mass, 0.0, 1.0) : 1.0;
    std::binomial_distribution<std::uint64_t> bin(left, p);
    out[k] = p >= 1.0 ? left : bin(rng);
    left -= out[k];
    mass -= probs[k];
  }
  return out;
}

CoincidenceRecord sample_record(const PulseModel& model, const SwapSetting& setting, bool accept_psi_plus,
                                std::uint64_t pulses, std::uint64_t seed, std::uint64_t index,
                                const RunOptions& opts) {
  const auto rp = record_probabilities(model, accept_psi_plus);
  std::vector<double> probs(32);
  std::array<int, kPatterns> category{};
  for (unsigned s = 0; s < kPatterns; ++s) {
    const BsmOutcome o = bsm_classify(s >> 4, accept_psi_plus);
    category[s] = o == BsmOutcome::Fail ? -1
                                        : static_cast<int>((o == BsmOutcome::PsiMinus ? 0u : 16u) + (s & 3u) * 4u +
                                                           ((s >> 2) & 3u));
  }
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t d = 0; d < 4; ++d) probs[b * 16 + a * 4 + d] = rp[b][a][d];
    }
  }
  const auto counts = draw_counts(model, probs, category, pulses, seed, index, opts);
  CoincidenceRecord rec;
  rec.setting = setting;
  rec.pulses = pulses;
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t d = 0; d < 4; ++d) rec.counts[b][a][d] = counts[b * 16 + a * 4 + d];
    }
  }
  return rec;
}

std::vector<CoincidenceRecord> run_swap(const ExperimentConfig& config, const std::vector<SwapSetting>& settings,
                                        std::uint64_t pulses, std::uint64_t seed, const RunOptions& opts) {
  if (settings.empty()) throw std::invalid_argument("run_swap: no settings given");
  if (pulses == 0) throw std::invalid_argument("run_swap: pulses must be positive");
  config.validate();
  // Models are built in parallel; sampling stays in setting order.
  std::vector<std::optional<PulseModel>> models(settings.size());
  const unsigned w = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(settings.size())));
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  for (unsigned t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (std::size_t k = t; k < settings.size(); k += w) models[k].emplace(config, settings[k], opts.engine);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<CoincidenceRecord> out;
  out.reserve(settings.size());
  for (std::size_t k = 0; k < settings.size(); ++k) {
    out.push_back(sample_record(*models[k], settings[k], config.accept_psi_plus, pulses, seed, k, opts));
  }
  return out;
}

// ---------------------------------------------------------------------------
// HOM

namespace {

std::array<int, kPatterns> hom_categories(bool conditioned) {
  std::array<int, kPatterns> cat{};
  for (unsigned s = 0; s < kPatterns; ++s) {
    const unsigned b = s >> 4;
    const bool same_bin = ((b & 0x1u) && (b & 0x4u)) || ((b & 0x2u) && (b & 0x8u));
    const bool herald = (s & 0x3u) != 0 && (s & 0xCu) != 0;
    cat[s] = same_bin && (!conditioned || herald) ? 0 : -1;
  }
  return cat;
}

PulseModel hom_model(const ExperimentConfig& config, double overlap) {
  EngineOptions eo;
  eo.overlap_override = overlap;
  return PulseModel(config, {AnalyzerSetting::z(), AnalyzerSetting::z()}, eo);
}

double category_probability(const PulseModel& m, const std::array<int, kPatterns>& cat) {
  double p = 0.0;
  for (unsigned s = 0; s < kPatterns; ++s) {
    if (cat[s] == 0) p += m.pattern_probabilities()[s];
  }
  return p;
}

}  // namespace

double hom_coincidence_probability(const ExperimentConfig& config, double overlap, bool conditioned) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("hom: overlap outside [0, 1]");
  return category_probability(hom_model(config, overlap), hom_categories(conditioned));
}

HomResult run_hom(const ExperimentConfig& config, double overlap, std::uint64_t pulses, std::uint64_t seed,
                  bool conditioned, const RunOptions& opts) {
  if (pulses == 0) throw std::invalid_argument("run_hom: pulses must be positive");
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw std::invalid_argument("run_hom: overlap outside [0, 1]");
  const auto cat = hom_categories(conditioned);
  const PulseModel distinguishable = hom_model(config, 0.0);
  const PulseModel partial = hom_model(config, overlap);

  HomResult r;
  r.pulses = pulses;
  r.p_max = category_probability(distinguishable, cat);
  r.p_min = category_probability(partial, cat);
  r.n_max = draw_counts(distinguishable, {r.p_max}, cat, pulses, seed, 0, opts)[0];
  r.n_min = draw_counts(partial, {r.p_min}, cat, pulses, seed, 1, opts)[0];
  if (r.n_max == 0) throw NumericalError("run_hom: no coincidences at full distinguishability; increase pulses");
  const double nmax = static_cast<double>(r.n_max);
  const double nmin = static_cast<double>(r.n_min);
  r.visibility = (nmax - nmin) / nmax;
  r.sigma = nmin > 0.0 ? (nmin / nmax) * std::sqrt(1.0 / nmin + 1.0 / nmax) : 1.0 / nmax;
  return r;
}

double hom_visibility_bound(double pump_duration, double coherence_time) {
  if (!(coherence_time > 0.0)) throw std::invalid_argument("hom_visibility_bound: coherence time must be positive");
  if (!(pump_duration >= 0.0)) throw std::invalid_argument("hom_visibility_bound: pump duration must be ≥ 0");
  const double r = pump_duration / coherence_time;
  return 1.0 / std::sqrt(1.0 + r * r);
}

}  // namespace swapsim
