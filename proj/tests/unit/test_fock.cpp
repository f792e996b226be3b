#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "swapsim/error.hpp"
#include "swapsim/fock.hpp"

using namespace swapsim;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

std::vector<ModeLabel> pair_of_modes(OverlapSlot slot = OverlapSlot::Common) {
  return {{Wavelength::Nm1533, Spatial::B, 0, slot}, {Wavelength::Nm1533, Spatial::C, 0, slot}};
}

double binomial(int n, int k, double p) {
  return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)) * std::pow(p, k) *
         std::pow(1.0 - p, n - k);
}

// Random state over `modes` with up to `max_photons` photons.
FockState random_state(std::mt19937_64& rng, const std::vector<ModeLabel>& modes, int max_photons) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(modes.size()) - 1);
  std::vector<std::pair<std::vector<ModeIndex>, Complex>> terms;
  for (int t = 0; t < 8; ++t) {
    std::vector<ModeIndex> photons;
    const int n = t % (max_photons + 1);
    for (int k = 0; k < n; ++k) photons.push_back(static_cast<ModeIndex>(pick(rng)));
    terms.emplace_back(photons, Complex(g(rng), g(rng)));
  }
  FockState s = FockState::from_creation_terms(modes, terms);
  return s.scaled(1.0 / std::sqrt(s.norm_squared()));
}

}  // namespace

TEST(FockState, VacuumHasUnitNorm) {
  const FockState v(pair_of_modes());
  EXPECT_DOUBLE_EQ(v.norm_squared(), 1.0);
  EXPECT_EQ(v.max_photons(), 0u);
  const std::array<int, 2> zero{0, 0};
  EXPECT_EQ(v.amplitude(zero), Complex(1.0));
}

TEST(FockState, CreationTermsCarryFactorialWeight) {
  // (a†)²|0⟩ = √2 |2⟩
  const auto s = FockState::from_creation_terms(pair_of_modes(), {{{0, 0}, 1.0}});
  const std::array<int, 2> two{2, 0};
  EXPECT_NEAR(s.amplitude(two).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.norm_squared(), 2.0, 1e-15);
}

TEST(FockState, MonomialOperations) {
  const std::array<ModeIndex, 3> modes{3, 1, 3};
  const auto m = Monomial::from_modes(modes);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.count(3), 2);
  EXPECT_EQ(m.count(1), 1);
  EXPECT_DOUBLE_EQ(m.factorial_weight(), 2.0);
  EXPECT_EQ(m.without(3).count(3), 0);
  EXPECT_EQ(m.without(3).size(), 1u);
  EXPECT_EQ(m.times(ModeIndex{1}).count(1), 2);
  EXPECT_EQ(m.occupation(4), (std::vector<int>{0, 1, 0, 2}));
}

TEST(BeamSplitter, HomExactCancellation) {
  const std::array<int, 2> in{1, 1};
  const auto out = beam_splitter(FockState::basis(pair_of_modes(), in), 0, 1);
  const std::array<int, 2> coinc{1, 1}, left{2, 0}, right{0, 2};
  EXPECT_EQ(std::abs(out.amplitude(coinc)), 0.0);  // exact, not approximate
  EXPECT_NEAR(out.amplitude(left).real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(out.amplitude(right).real(), -kInvSqrt2, 1e-15);
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-15);
}

TEST(BeamSplitter, OrthogonalSlotsGiveHalfCoincidence) {
  // Photon 1 in slot B on port a, photon 2 in slot C on port b.
  const std::vector<ModeLabel> modes{
      {Wavelength::Nm1533, Spatial::BsmOut1, 0, OverlapSlot::DistinctB},
      {Wavelength::Nm1533, Spatial::BsmOut2, 0, OverlapSlot::DistinctB},
      {Wavelength::Nm1533, Spatial::BsmOut1, 0, OverlapSlot::DistinctC},
      {Wavelength::Nm1533, Spatial::BsmOut2, 0, OverlapSlot::DistinctC},
  };
  const std::array<int, 4> in{1, 0, 0, 1};
  auto s = FockState::basis(modes, in);
  s = beam_splitter(s, 0, 1);
  s = beam_splitter(s, 2, 3);
  double coinc = 0.0;
  s.for_each_amplitude([&](const Monomial& m, Complex a) {
    const int port1 = m.count(0) + m.count(2);
    const int port2 = m.count(1) + m.count(3);
    if (port1 == 1 && port2 == 1) coinc += std::norm(a);
  });
  // Independent routing: each photon exits either port with probability ½.
  EXPECT_NEAR(coinc, 0.5, 1e-15);
}

TEST(BeamSplitter, SinglePhotonSplitsEvenly) {
  const std::array<int, 2> in{1, 0}, o1{1, 0}, o2{0, 1};
  const auto out = beam_splitter(FockState::basis(pair_of_modes(), in), 0, 1);
  EXPECT_NEAR(out.amplitude(o1).real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(out.amplitude(o2).real(), kInvSqrt2, 1e-15);
}

TEST(BeamSplitter, PreservesNormOnRandomStates) {
  std::mt19937_64 rng(17);
  const std::vector<ModeLabel> modes{
      {Wavelength::Nm1533, Spatial::B, 0, OverlapSlot::Common},
      {Wavelength::Nm1533, Spatial::C, 0, OverlapSlot::Common},
      {Wavelength::Nm1533, Spatial::B, 1, OverlapSlot::Common},
      {Wavelength::Nm1533, Spatial::C, 1, OverlapSlot::Common},
  };
  for (int trial = 0; trial < 30; ++trial) {
    auto s = random_state(rng, modes, 4);
    for (double r : {0.5, 0.1, 0.73}) {
      s = beam_splitter(s, 0, 1, r);
      s = beam_splitter(s, 2, 3, r);
      EXPECT_NEAR(s.norm_squared(), 1.0, 1e-9);
    }
  }
}

TEST(BeamSplitter, IsItsOwnInverseAtHalf) {
  std::mt19937_64 rng(1);
  const auto s = random_state(rng, pair_of_modes(), 4);
  const auto back = beam_splitter(beam_splitter(s, 0, 1), 0, 1);
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      const std::array<int, 2> occ{a, b};
      EXPECT_NEAR(std::abs(back.amplitude(occ) - s.amplitude(occ)), 0.0, 1e-12);
    }
  }
}

TEST(BeamSplitter, RejectsIncompatibleModes) {
  std::vector<ModeLabel> modes = pair_of_modes();
  modes[1].temporal = 1;
  EXPECT_THROW(beam_splitter(FockState(modes), 0, 1), std::invalid_argument);
  modes = pair_of_modes();
  modes[1].wavelength = Wavelength::Nm795;
  EXPECT_THROW(beam_splitter(FockState(modes), 0, 1), std::invalid_argument);
  modes = pair_of_modes();
  modes[1].slot = OverlapSlot::DistinctC;
  EXPECT_THROW(beam_splitter(FockState(modes), 0, 1), std::invalid_argument);
  EXPECT_THROW(beam_splitter(FockState(pair_of_modes()), 0, 0), std::invalid_argument);
}

TEST(Loss, UnitTransmissionIsIdentity) {
  const std::array<int, 2> in{2, 1};
  const auto s = FockState::basis(pair_of_modes(), in);
  const auto mix = apply_loss(s, 0, 1.0);
  ASSERT_EQ(mix.branches.size(), 1u);
  EXPECT_NEAR(std::abs(mix.branches[0].amplitude(in) - s.amplitude(in)), 0.0, 1e-15);
}

TEST(Loss, ZeroTransmissionEmptiesMode) {
  const std::array<int, 2> in{3, 1};
  const auto mix = apply_loss(FockState::basis(pair_of_modes(), in), 0, 0.0);
  EXPECT_NEAR(mix.total_weight(), 1.0, 1e-14);
  EXPECT_NEAR(mix.mean_photons(0), 0.0, 1e-15);
  EXPECT_NEAR(mix.mean_photons(1), 1.0, 1e-14);
}

TEST(Loss, SinglePhotonMeanScales) {
  const std::array<int, 2> in{1, 0};
  for (double t : {0.1, 0.5, 0.9}) {
    const auto mix = apply_loss(FockState::basis(pair_of_modes(), in), 0, t);
    EXPECT_NEAR(mix.mean_photons(0), t, 1e-14);
  }
}

TEST(Loss, MatchesBinomialThinning) {
  // Superposition of number states: each |n⟩ thins to Binomial(n, t).
  const std::vector<double> weights{0.1, 0.2, 0.3, 0.25, 0.15};
  std::vector<std::pair<std::vector<ModeIndex>, Complex>> terms;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    double fact = std::tgamma(static_cast<double>(n) + 1.0);
    terms.emplace_back(std::vector<ModeIndex>(n, ModeIndex{0}), Complex(0.0, std::sqrt(weights[n] / fact)));
  }
  const auto s = FockState::from_creation_terms(pair_of_modes(), terms);
  ASSERT_NEAR(s.norm_squared(), 1.0, 1e-14);
  const double t = 0.37;
  const auto dist = apply_loss(s, 0, t).photon_number_distribution(0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    double want = 0.0;
    for (std::size_t n = k; n < weights.size(); ++n) {
      want += weights[n] * binomial(static_cast<int>(n), static_cast<int>(k), t);
    }
    ASSERT_LT(k, dist.size());
    EXPECT_NEAR(dist[k], want, 1e-13) << k;
  }
}

TEST(Loss, CommutesWithUniformBeamSplitter) {
  // Equal loss on both inputs equals equal loss on both outputs, which is what
  // allows loss to be folded into detector efficiency.
  std::mt19937_64 rng(23);
  const auto s = random_state(rng, pair_of_modes(), 4);
  const double t = 0.6;
  const auto before = apply_loss(apply_loss(s, 0, t), 1, t);
  FockMixture lossy_first;
  for (const auto& b : before.branches) lossy_first.branches.push_back(beam_splitter(b, 0, 1));
  const auto lossy_after = apply_loss(apply_loss(beam_splitter(s, 0, 1), 0, t), 1, t);
  for (std::size_t m = 0; m < 2; ++m) {
    const auto d1 = lossy_first.photon_number_distribution(m);
    const auto d2 = lossy_after.photon_number_distribution(m);
    for (std::size_t k = 0; k < std::min(d1.size(), d2.size()); ++k) EXPECT_NEAR(d1[k], d2[k], 1e-12);
  }
}

TEST(Loss, RejectsBadTransmission) {
  EXPECT_THROW(apply_loss(FockState(pair_of_modes()), 0, 1.5), std::invalid_argument);
  EXPECT_THROW(apply_loss(FockState(pair_of_modes()), 5, 0.5), DimensionError);
}
