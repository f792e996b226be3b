#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "swapsim/metrics.hpp"
#include "swapsim/tomography.hpp"

using namespace swapsim;

namespace {

DensityMatrix random_state(std::mt19937_64& rng, int rank) {
  std::normal_distribution<double> g;
  CMatrix a(4, rank);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < rank; ++c) a(r, c) = Complex(g(rng), g(rng));
  CMatrix m = a * a.adjoint();
  m /= m.trace().real();
  return DensityMatrix(0.5 * (m + m.adjoint()));
}

std::vector<TomographySetting> poisson_noised(std::vector<TomographySetting> data, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& s : data) {
    if (s.counts == 0) continue;
    std::poisson_distribution<std::uint64_t> p(static_cast<double>(s.counts));
    s.counts = p(rng);
  }
  return data;
}

bool valid_density(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  return is_hermitian(rho.matrix()) && std::abs(rho.matrix().trace().real() - 1.0) < 1e-9 &&
         es.eigenvalues().minCoeff() > -1e-8;
}

}  // namespace

TEST(Settings, StandardProtocolCoversAllPairs) {
  const auto s = standard_settings();
  ASSERT_EQ(s.size(), 36u);
  const auto p = standard_projectors();
  ASSERT_EQ(p.size(), 6u);
  // Each basis pair is complete: Σ over the four outcomes = 𝟙.
  for (int ba = 0; ba < 3; ++ba) {
    for (int bd = 0; bd < 3; ++bd) {
      CMatrix sum = CMatrix::Zero(4, 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) sum += s[static_cast<std::size_t>((2 * ba + i) * 6 + 2 * bd + j)].joint_projector();
      EXPECT_LT((sum - CMatrix::Identity(4, 4)).norm(), 1e-12);
    }
  }
  EXPECT_EQ(tomography_swap_settings().size(), 36u);
}

TEST(Settings, InformationallyComplete) {
  // The 36 joint projectors span all 16 Hermitian directions.
  Eigen::MatrixXd a(36, 32);
  const auto s = standard_settings();
  for (std::size_t j = 0; j < 36; ++j) {
    const CMatrix p = s[j].joint_projector();
    for (int k = 0; k < 16; ++k) {
      a(static_cast<Eigen::Index>(j), k) = p(k / 4, k % 4).real();
      a(static_cast<Eigen::Index>(j), 16 + k) = p(k / 4, k % 4).imag();
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  EXPECT_EQ(lu.rank(), 16);
}

TEST(Mle, RecoversPsiPlus) {
  const auto psi = bell_state(BellKind::PsiPlus);
  const auto data = expected_dataset(DensityMatrix::from_ket(psi), 1e6);
  const auto r = mle_reconstruct(data);
  EXPECT_TRUE(r.converged);
  EXPECT_GT(fidelity(r.rho, psi), 0.999);
}

TEST(Mle, RecoversMaximallyMixed) {
  const auto mixed = DensityMatrix::maximally_mixed(4);
  const auto r = mle_reconstruct(expected_dataset(mixed, 1e6));
  EXPECT_LT(trace_distance(r.rho, mixed), 1e-3);
}

TEST(Mle, ExposureScalingIsRespected) {
  // Same state, data declared at unit exposure: still reconstructs.
  const auto w = werner_state(0.6, bell_state(BellKind::PsiPlus));
  const auto r = mle_reconstruct(expected_dataset(w, 1e7, false));
  EXPECT_LT(trace_distance(r.rho, w), 1e-3);
}

TEST(Mle, LikelihoodAtLeastTruthOnNoisyData) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10; ++t) {
    const auto truth = random_state(rng, 1 + t % 4);
    const auto data = poisson_noised(expected_dataset(truth, 2000), 100 + static_cast<std::uint64_t>(t));
    const auto r = mle_reconstruct(data);
    EXPECT_GE(r.log_likelihood, log_likelihood(data, truth) - 1e-9) << t;
    EXPECT_TRUE(valid_density(r.rho)) << t;
  }
}

TEST(Mle, OutputAlwaysPhysical) {
  // Pathological counts (only one nonzero setting) still give a valid state.
  auto data = standard_settings();
  data[7].counts = 10;
  const auto r = mle_reconstruct(data);
  EXPECT_TRUE(valid_density(r.rho));
}

TEST(Mle, AllZeroCountsThrow) { EXPECT_THROW(mle_reconstruct(standard_settings()), std::invalid_argument); }

TEST(Mle, DeterministicAcrossCalls) {
  const auto data = poisson_noised(expected_dataset(werner_state(0.5, bell_state(BellKind::PsiPlus)), 400), 5);
  const auto a = mle_reconstruct(data), b = mle_reconstruct(data);
  EXPECT_EQ(a.rho.matrix(), b.rho.matrix());
  EXPECT_EQ(a.best_start, b.best_start);
}

TEST(Bootstrap, RejectsTooFewResamples) {
  const auto data = expected_dataset(DensityMatrix::maximally_mixed(4), 1000);
  EXPECT_THROW(bootstrap(data, 0, 1, concurrence_statistic()), std::invalid_argument);
  EXPECT_THROW(bootstrap(data, 99, 1, concurrence_statistic()), std::invalid_argument);
}

TEST(Bootstrap, HighCountPsiPlusHasSmallSpread) {
  const auto data = expected_dataset(DensityMatrix::from_ket(bell_state(BellKind::PsiPlus)), 1e6);
  const auto b = bootstrap(data, 100, 3, concurrence_statistic(), 4);
  EXPECT_EQ(b.dropped, 0u);
  EXPECT_LT(b.stddev, 0.01);
  EXPECT_LE(b.lo, b.hi);
}

TEST(Bootstrap, MeanConvergesToPointEstimate) {
  const auto w = werner_state(0.6, bell_state(BellKind::PsiPlus));
  const auto data = expected_dataset(w, 1e7);
  const double point = concurrence(mle_reconstruct(data).rho);
  const auto b = bootstrap(data, 100, 8, concurrence_statistic(), 4);
  EXPECT_LT(std::abs(b.mean - point), 0.005);
}

TEST(Bootstrap, IndependentOfWorkerCount) {
  const auto data = expected_dataset(werner_state(0.6, bell_state(BellKind::PsiPlus)), 500);
  const auto a = bootstrap(data, 100, 21, concurrence_statistic(), 1);
  const auto b = bootstrap(data, 100, 21, concurrence_statistic(), 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.mean, b.mean);
}

TEST(Bootstrap, PaperLikeCountsGiveSpreadOfOrderPointZeroSeven) {
  // ~360 fourfolds across 36 settings, as in a multi-day run.
  const auto data = expected_dataset(werner_state(0.592, bell_state(BellKind::PsiPlus)), 360);
  const auto b = bootstrap(data, 100, 4, concurrence_statistic(), 4);
  EXPECT_GT(b.stddev, 0.02);
  EXPECT_LT(b.stddev, 0.2);
}

TEST(Bootstrap, ManyStatisticsShareResamples) {
  const auto data = expected_dataset(werner_state(0.7, bell_state(BellKind::PsiPlus)), 2000);
  const auto many = bootstrap_many(data, 100, 9,
                                   {concurrence_statistic(), fidelity_statistic(bell_state(BellKind::PsiPlus))}, 2);
  const auto single = bootstrap(data, 100, 9, concurrence_statistic(), 2);
  ASSERT_EQ(many.size(), 2u);
  EXPECT_EQ(many[0].values, single.values);
  EXPECT_GT(many[1].mean, 0.7);
}

TEST(Bootstrap, JointStatisticMatchesSeparateStatistics) {
  const auto data = expected_dataset(werner_state(0.7, bell_state(BellKind::PsiPlus)), 2000);
  const Ket psi = bell_state(BellKind::PsiPlus);
  auto joint = [&psi](const DensityMatrix& rho) { return std::vector<double>{concurrence(rho), fidelity(rho, psi)}; };
  const auto a = bootstrap_joint(data, 100, 9, joint, 2, 3);
  const auto b = bootstrap_many(data, 100, 9, {concurrence_statistic(), fidelity_statistic(psi)}, 1);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].values, b[0].values);
  EXPECT_EQ(a[1].values, b[1].values);
  EXPECT_THROW(bootstrap_joint(data, 100, 9, joint, 0), std::invalid_argument);
}
