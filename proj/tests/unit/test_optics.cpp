#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "swapsim/error.hpp"
#include "swapsim/metrics.hpp"
#include "swapsim/optics.hpp"

using namespace swapsim;

namespace {

constexpr double kPi = std::numbers::pi;

double total_weight(const std::vector<SourceComponent>& comps) {
  double w = 0.0;
  for (const auto& c : comps) w += c.weight;
  return w;
}

// Probability that both given modes hold exactly one photon (others free).
double joint_click(const FockState& s, std::size_t m1, std::size_t m2) {
  double p = 0.0;
  s.for_each_amplitude([&](const Monomial& mono, Complex a) {
    if (mono.count(static_cast<ModeIndex>(m1)) == 1 && mono.count(static_cast<ModeIndex>(m2)) == 1) p += std::norm(a);
  });
  return p;
}

std::size_t find(const FockState& s, Spatial sp, int temporal, OverlapSlot slot = OverlapSlot::Common) {
  for (std::size_t i = 0; i < s.mode_count(); ++i) {
    const auto& m = s.modes()[i];
    if (m.spatial == sp && m.temporal == temporal && m.slot == slot) return i;
  }
  ADD_FAILURE() << "mode not found";
  return 0;
}

// 795 nm photons on A and D in |Ψ+⟩ = (|eℓ⟩ + |ℓe⟩)/√2.
FockState psi_plus_ad() {
  const std::vector<ModeLabel> modes{
      {Wavelength::Nm795, Spatial::A, 0, OverlapSlot::Common},
      {Wavelength::Nm795, Spatial::A, 1, OverlapSlot::Common},
      {Wavelength::Nm795, Spatial::D, 0, OverlapSlot::Common},
      {Wavelength::Nm795, Spatial::D, 1, OverlapSlot::Common},
  };
  const double h = 1.0 / std::numbers::sqrt2;
  return FockState::from_creation_terms(modes, {{{0, 3}, h}, {{1, 2}, h}});
}

FockState single_795(Complex ce, Complex cl) {
  return FockState::from_creation_terms(source_modes(Spatial::A, Spatial::B), {{{0}, ce}, {{1}, cl}});
}

}  // namespace

TEST(PairWeights, ThermalRatio) {
  SourceParams p;
  p.mu = 0.191;
  const auto w = pair_weights(p, 2);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_NEAR(w[2] / w[1], 0.191 / 1.191, 1e-12);
  EXPECT_NEAR(w[2] / w[1], 0.160, 5e-4);
  EXPECT_NEAR(w[0] + w[1] + w[2], 1.0, 1e-14);
}

TEST(PairWeights, PoissonianRatio) {
  SourceParams p;
  p.mu = 0.2;
  p.statistics = PairStatistics::Poissonian;
  const auto w = pair_weights(p, 3);
  EXPECT_NEAR(w[2] / w[1], 0.1, 1e-12);
  EXPECT_NEAR(w[3] / w[2], 0.2 / 3.0, 1e-12);
}

TEST(PairWeights, ZeroMuIsVacuum) {
  SourceParams p;
  const auto w = pair_weights(p, 2);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_EQ(w[1], 0.0);
}

TEST(SourceParams, Validation) {
  SourceParams p;
  p.mu = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.mu = 0.1;
  p.state_fidelity = 1.2;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.state_fidelity = 0.1;  // below the depolarising floor of 1/4
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Spdc, ZeroMuGivesVacuum) {
  const auto comps = spdc_state(SourceParams{}, 4);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].pairs, 0);
  EXPECT_NEAR(comps[0].state.norm_squared(), 1.0, 1e-15);
  EXPECT_EQ(comps[0].state.max_photons(), 0u);
}

TEST(Spdc, TruncationBelowTwoThrows) {
  EXPECT_THROW(spdc_state(SourceParams{}, 1), std::invalid_argument);
}

TEST(Spdc, ComponentsNormalisedAndWeightsSumToOne) {
  SourceParams p;
  p.mu = 0.191;
  p.state_fidelity = 0.95;
  const auto comps = spdc_state(p, 4);
  EXPECT_NEAR(total_weight(comps), 1.0, 1e-14);
  for (const auto& c : comps) {
    EXPECT_NEAR(c.state.norm_squared(), 1.0, 1e-12);
    EXPECT_EQ(c.state.max_photons(), static_cast<std::size_t>(2 * c.pairs));
  }
}

TEST(Spdc, OnePairSectorIsPhiPlusAtUnitFidelity) {
  SourceParams p;
  p.mu = 0.191;
  const auto rho = one_pair_sector(spdc_state(p, 4));
  EXPECT_NEAR(fidelity(rho, bell_state(BellKind::PhiPlus)), 1.0, 1e-12);
}

TEST(Spdc, PhasePiGivesPhiMinus) {
  SourceParams p;
  p.mu = 0.1;
  p.phase = kPi;
  const auto rho = one_pair_sector(spdc_state(p, 4));
  EXPECT_NEAR(fidelity(rho, bell_state(BellKind::PhiMinus)), 1.0, 1e-12);
}

TEST(Spdc, OnePairNoiseMatchesAnalyticDensity) {
  for (auto noise : {SourceNoise::Depolarizing, SourceNoise::Dephasing}) {
    SourceParams p;
    p.mu = 0.05;
    p.state_fidelity = 0.95;
    p.noise = noise;
    const auto extracted = one_pair_sector(spdc_state(p, 4));
    const auto analytic = one_pair_density(p);
    EXPECT_LT((extracted.matrix() - analytic.matrix()).norm(), 1e-12);
    EXPECT_NEAR(fidelity(analytic, bell_state(BellKind::PhiPlus)), 0.95, 1e-12);
  }
}

TEST(Spdc, TwoPairSectorHasEqualBranches) {
  // K²|0⟩ ∝ |2,0,2,0⟩ + e^{iθ}|1,1,1,1⟩ + e^{2iθ}|0,2,0,2⟩ with equal weights.
  SourceParams p;
  p.mu = 0.2;
  p.phase = 0.7;
  for (const auto& c : spdc_state(p, 4)) {
    if (c.pairs != 2) continue;
    const std::array<int, 4> a{2, 0, 2, 0}, b{1, 1, 1, 1}, d{0, 2, 0, 2};
    EXPECT_NEAR(std::norm(c.state.amplitude(a)), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(std::norm(c.state.amplitude(b)), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(std::norm(c.state.amplitude(d)), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(std::arg(c.state.amplitude(b) / c.state.amplitude(a)), 0.7, 1e-12);
    return;
  }
  FAIL() << "no two-pair component";
}

TEST(Analyzer, ZBasisRoutesBins) {
  const auto out = analyzer(single_795(1.0, 0.0), Side::A, AnalyzerSetting::z());
  EXPECT_NEAR(out.state.mean_photons(out.outcome_modes[0]), 1.0, 1e-15);
  EXPECT_NEAR(out.state.mean_photons(out.outcome_modes[1]), 0.0, 1e-15);
  const auto late = analyzer(single_795(0.0, 1.0), Side::A, AnalyzerSetting::z());
  EXPECT_NEAR(late.state.mean_photons(late.outcome_modes[1]), 1.0, 1e-15);
}

TEST(Analyzer, SingleBinGivesQuarterPerPortAnyPhase) {
  for (double phi : {0.0, 1.0, kPi, 5.0}) {
    const auto out = analyzer(single_795(1.0, 0.0), Side::A, AnalyzerSetting::phase(phi));
    EXPECT_NEAR(out.state.mean_photons(out.outcome_modes[0]), 0.25, 1e-14) << phi;
    EXPECT_NEAR(out.state.mean_photons(out.outcome_modes[1]), 0.25, 1e-14) << phi;
    EXPECT_NEAR(out.state.norm_squared(), 1.0, 1e-14);
  }
}

TEST(Analyzer, SuperpositionInterferes) {
  const double h = 1.0 / std::numbers::sqrt2;
  const auto out = analyzer(single_795(h, h), Side::A, AnalyzerSetting::phase(0.0));
  EXPECT_NEAR(out.state.mean_photons(out.outcome_modes[0]), 0.5, 1e-14);
  EXPECT_NEAR(out.state.mean_photons(out.outcome_modes[1]), 0.0, 1e-14);
}

TEST(Analyzer, MiddleBinRealisesPhaseProjector) {
  // "+" middle-bin probability equals ½⟨ψ|Π(φ)|ψ⟩ for a random qubit.
  const Complex ce(0.3, 0.4), cl(-0.6, 0.2);
  const double n = std::norm(ce) + std::norm(cl);
  CVector psi(2);
  psi << ce, cl;
  for (double phi : {0.2, 2.5, 4.4}) {
    const auto out = analyzer(single_795(ce, cl), Side::A, AnalyzerSetting::phase(phi));
    const double want = 0.5 * psi.dot(Projector::phase(phi).matrix() * psi).real() / n;
    EXPECT_NEAR(out.state.mean_photons(out.outcome_modes[0]) / n, want, 1e-14);
  }
}

TEST(Analyzer, PsiPlusPhaseScanMatchesTrace) {
  const auto rho = DensityMatrix::from_ket(bell_state(BellKind::PsiPlus));
  for (double alpha : {0.0, 0.9, 2.0, kPi, 4.5}) {
    const double beta = 0.4;
    const auto a = analyzer(psi_plus_ad(), Side::A, AnalyzerSetting::phase(alpha));
    const auto d = analyzer(a.state, Side::D, AnalyzerSetting::phase(beta));
    // Side D's output indices shift after A's modes are removed; look them up.
    const std::size_t pa = find(d.state, Spatial::APlus, 1);
    const double p = joint_click(d.state, pa, d.outcome_modes[0]);
    const double trace = expectation(rho, kron(Projector::phase(alpha).matrix(), Projector::phase(beta).matrix()));
    EXPECT_NEAR(p, 0.25 * trace, 1e-14) << alpha;
    EXPECT_NEAR(trace, (1.0 + std::cos(alpha - beta)) / 4.0, 1e-14);
  }
}

TEST(Analyzer, RejectsPhaseOutOfRange) {
  EXPECT_THROW(AnalyzerSetting::phase(7.0), std::invalid_argument);
  AnalyzerSetting bad{Projector::Basis::Phase, -1.0};
  EXPECT_THROW(analyzer(single_795(1.0, 0.0), Side::A, bad), std::invalid_argument);
}

TEST(Analyzer, MissingSideThrows) {
  EXPECT_THROW(analyzer(single_795(1.0, 0.0), Side::D, AnalyzerSetting::z()), DimensionError);
}

TEST(Bsm, ImagesAreNormalised) {
  for (double ov : {0.0, 0.5, 0.89, 1.0}) {
    for (bool c : {false, true}) {
      double n = 0.0;
      for (const auto& [o, a] : bsm_images(c, 1, ov)) n += std::norm(a);
      EXPECT_NEAR(n, 1.0, 1e-14);
    }
  }
}

TEST(Bsm, SinglePhotonHomVisibilityEqualsOverlap) {
  auto p_coinc = [](double overlap) {
    auto modes = source_modes(Spatial::A, Spatial::B);
    for (auto& m : source_modes(Spatial::D, Spatial::C)) modes.push_back(m);
    // One photon in B early (index 2) and one in C early (index 6).
    const auto s = bsm_interfere(FockState::from_creation_terms(modes, {{{2, 6}, 1.0}}), overlap);
    double p = 0.0;
    s.for_each_amplitude([&](const Monomial& mono, Complex a) {
      int n1 = 0, n2 = 0;
      for (std::size_t i = 0; i < mono.size(); ++i) {
        const auto sp = s.modes()[mono[i]].spatial;
        n1 += sp == Spatial::BsmOut1;
        n2 += sp == Spatial::BsmOut2;
      }
      if (n1 == 1 && n2 == 1) p += std::norm(a);
    });
    return p;
  };
  EXPECT_NEAR(p_coinc(0.0), 0.5, 1e-14);
  EXPECT_NEAR(p_coinc(1.0), 0.0, 1e-14);
  for (double ov : {0.3, 0.89}) EXPECT_NEAR(1.0 - p_coinc(ov) / p_coinc(0.0), ov, 1e-12);
}

TEST(Bsm, InterferencePreservesNorm) {
  SourceParams p;
  p.mu = 0.191;
  const auto ab = spdc_state(p, 4, Spatial::A, Spatial::B);
  const auto dc = spdc_state(p, 4, Spatial::D, Spatial::C);
  auto modes = ab.back().state.modes();
  for (const auto& m : dc.back().state.modes()) modes.push_back(m);
  // Place both two-pair states side by side and interfere.
  std::vector<std::pair<std::vector<ModeIndex>, Complex>> left{{{0, 2, 0, 2}, 1.0}, {{0, 3, 1, 2}, 0.5}};
  std::vector<std::pair<std::vector<ModeIndex>, Complex>> right{{{4, 6}, 1.0}, {{5, 7, 5, 7}, 0.3}};
  auto st = FockState::from_creation_terms(modes, left).product(FockState::from_creation_terms(modes, right));
  st = st.scaled(1.0 / std::sqrt(st.norm_squared()));
  EXPECT_NEAR(bsm_interfere(st, 0.89).norm_squared(), 1.0, 1e-9);
}
