#include "ssp/csrecover.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "testutil.hpp"

using ssp::Index;
using ssp::SparseSolution;
using ssptest::gaussian_matrix;

namespace {

std::vector<Index> iota_rows(Index n) {
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
  return rows;
}

}  // namespace

TEST(Dct, RoundTripAndParseval) {
  const Eigen::VectorXd x = gaussian_matrix(64, 1, 3);
  const Eigen::VectorXd s = ssp::dct_analyze(x);
  EXPECT_NEAR(s.norm(), x.norm(), 1e-12 * x.norm());
  EXPECT_LT((ssp::dct_synthesize(s) - x).norm(), 1e-12 * x.norm());
}

TEST(Dct, FullSynthesisMatrixIsOrthonormal) {
  const Eigen::MatrixXd theta = ssp::dct_synthesis_rows(16, iota_rows(16));
  EXPECT_LT((theta * theta.transpose() - Eigen::MatrixXd::Identity(16, 16))
                .norm(),
            1e-12);
  EXPECT_LT((theta.transpose() * theta - Eigen::MatrixXd::Identity(16, 16))
                .norm(),
            1e-12);
}

TEST(Dct, MidpointToneLandsOnSingleBin) {
  // cos(2 pi f (t + 0.5) / n) is exactly DCT-II atom k = 2f.
  const Index n = 32;
  const double f = 4;
  Eigen::VectorXd x(n);
  for (Index t = 0; t < n; ++t)
    x(t) = std::cos(2.0 * M_PI * f * (static_cast<double>(t) + 0.5) /
                    static_cast<double>(n));
  const Eigen::VectorXd s = ssp::dct_analyze(x);
  for (Index k = 0; k < n; ++k) {
    if (k == 8)
      EXPECT_NEAR(s(k), std::sqrt(static_cast<double>(n) / 2.0), 1e-12);
    else
      EXPECT_NEAR(s(k), 0.0, 1e-11);
  }
}

TEST(Omp, RecoversExactlySparseSignals) {
  const Eigen::MatrixXd theta = gaussian_matrix(20, 50, 5);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(50);
  x0(7) = 3.0;
  x0(23) = -2.0;
  const Eigen::VectorXd y = theta * x0;

  const SparseSolution sol = ssp::omp_recover(theta, y, 5, 1e-10 * y.norm());
  const std::set<Index> support(sol.support.begin(), sol.support.end());
  EXPECT_TRUE(support.count(7));
  EXPECT_TRUE(support.count(23));
  EXPECT_LE(sol.residual_norm, 1e-10 * y.norm());
  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    const double expect = sol.support[i] == 7 ? 3.0
                         : sol.support[i] == 23 ? -2.0
                                                : 0.0;
    EXPECT_NEAR(sol.values(static_cast<Index>(i)), expect, 1e-8);
  }
}

TEST(Omp, ResidualHistoryIsMonotone) {
  const Eigen::MatrixXd theta = gaussian_matrix(15, 40, 9);
  const Eigen::VectorXd y = gaussian_matrix(15, 1, 10);
  const SparseSolution sol = ssp::omp_recover(theta, y, 10, 0.0);
  ASSERT_EQ(sol.residual_history.size(), 10u);
  EXPECT_LE(sol.residual_history[0], y.norm());
  for (std::size_t i = 1; i < sol.residual_history.size(); ++i)
    EXPECT_LE(sol.residual_history[i], sol.residual_history[i - 1] + 1e-12);
}

TEST(Omp, EdgeCases) {
  const Eigen::MatrixXd theta = gaussian_matrix(8, 20, 11);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(8);
  const SparseSolution empty = ssp::omp_recover(theta, zero, 4, 0.0);
  EXPECT_TRUE(empty.support.empty());
  EXPECT_EQ(empty.residual_norm, 0.0);

  const SparseSolution none =
      ssp::omp_recover(theta, Eigen::VectorXd::Ones(8), 0, 0.0);
  EXPECT_TRUE(none.support.empty());

  Eigen::MatrixXd with_zero = theta;
  with_zero.col(3).setZero();
  EXPECT_SSP_ERROR(ssp::omp_recover(with_zero, zero, 2, 0.0),
                   ssp::errc::zero_column);
  EXPECT_SSP_ERROR(ssp::omp_recover(theta, zero, 9, 0.0),
                   ssp::errc::invalid_argument);
}

TEST(Incoherence, IdentityBasisIsMaximal) {
  ssp::TailoredBasis eye;
  eye.modes = Eigen::MatrixXd::Identity(9, 9);
  eye.sigmas = Eigen::VectorXd::Ones(9);
  ssp::SensorSetRecord sensors;
  sensors.n = 9;
  sensors.indices = {1, 5};
  sensors.method = ssp::PlacementMethod::random;
  EXPECT_NEAR(ssp::incoherence(sensors, eye), 3.0, 1e-13);
}

TEST(Incoherence, DctIsNearlyIncoherent) {
  ssp::UniversalBasisSpec spec;
  spec.n = 64;
  ssp::SensorSetRecord sensors;
  sensors.n = 64;
  sensors.indices = {1, 17, 40, 64};
  sensors.method = ssp::PlacementMethod::random;
  const double mu = ssp::incoherence(sensors, spec);
  EXPECT_GE(mu, 1.0 - 1e-12);
  EXPECT_LE(mu, std::sqrt(2.0) + 1e-12);

  spec.n = 32;
  EXPECT_SSP_ERROR(ssp::incoherence(sensors, spec),
                   ssp::errc::dimension_mismatch);
}

TEST(Incoherence, FourierIsPerfectlyIncoherent) {
  ssp::SensorSetRecord sensors;
  sensors.n = 48;
  sensors.indices = {2, 3, 31};
  sensors.method = ssp::PlacementMethod::random;
  EXPECT_NEAR(ssp::incoherence_fourier(sensors, 48), 1.0, 1e-12);
}

TEST(BasicSolution, PivotOracle) {
  Eigen::MatrixXd theta(1, 2);
  theta << 1, 2;
  Eigen::VectorXd y(1);
  y << 4;
  const SparseSolution sol = ssp::basic_solution(theta, y);
  ASSERT_EQ(sol.support.size(), 1u);
  EXPECT_EQ(sol.support[0], 1);  // the norm-2 column wins
  EXPECT_NEAR(sol.values(0), 2.0, 1e-14);
  EXPECT_NEAR(sol.residual_norm, 0.0, 1e-14);
  EXPECT_FALSE(sol.reduced_support);
}

TEST(BasicSolution, IdentityBlockPassesThrough) {
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(2, 4);
  theta(0, 0) = 1;
  theta(1, 1) = 1;
  Eigen::VectorXd y(2);
  y << 5, -3;
  const SparseSolution sol = ssp::basic_solution(theta, y);
  ASSERT_EQ(sol.support.size(), 2u);
  EXPECT_EQ(std::min(sol.support[0], sol.support[1]), 0);
  EXPECT_EQ(std::max(sol.support[0], sol.support[1]), 1);
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_NEAR(sol.values(static_cast<Index>(i)),
                sol.support[i] == 0 ? 5.0 : -3.0, 1e-14);
}

TEST(BasicSolution, RankDeficiencyShrinksSupport) {
  Eigen::MatrixXd theta(2, 3);
  theta << 1, 1, 0,
           1, 1, 0;
  Eigen::VectorXd y(2);
  y << 2, 2;
  const SparseSolution sol = ssp::basic_solution(theta, y);
  EXPECT_TRUE(sol.reduced_support);
  ASSERT_EQ(sol.support.size(), 1u);
  EXPECT_EQ(sol.support[0], 0);  // tie between cols 0 and 1: lowest index
  EXPECT_NEAR(sol.values(0), 2.0, 1e-14);
  EXPECT_NEAR(sol.residual_norm, 0.0, 1e-14);
}

TEST(BasicSolution, SupportIgnoresRhs) {
  const Eigen::MatrixXd theta = gaussian_matrix(8, 32, 13);
  const SparseSolution first =
      ssp::basic_solution(theta, gaussian_matrix(8, 1, 100));
  for (std::uint64_t seed = 101; seed < 106; ++seed) {
    const SparseSolution sol =
        ssp::basic_solution(theta, gaussian_matrix(8, 1, seed));
    EXPECT_EQ(sol.support, first.support);
  }
}

TEST(BasicSolution, Validation) {
  EXPECT_SSP_ERROR(
      ssp::basic_solution(Eigen::MatrixXd::Ones(3, 3), Eigen::VectorXd::Ones(3)),
      ssp::errc::invalid_argument);
  EXPECT_SSP_ERROR(
      ssp::basic_solution(Eigen::MatrixXd::Zero(2, 5), Eigen::VectorXd::Ones(2)),
      ssp::errc::singular_matrix);
}

TEST(ThreeTone, RandomSamplingRecoversExactBins) {
  const ssp::ThreeToneReport rep = ssp::three_tone_demo(2048, 192, 1, false);
  EXPECT_EQ(rep.n, 2048);
  EXPECT_EQ(rep.p, 192);
  EXPECT_FALSE(rep.equispaced);
  ASSERT_EQ(rep.sample_indices.size(), 192u);
  EXPECT_TRUE(std::is_sorted(rep.sample_indices.begin(),
                             rep.sample_indices.end()));
  EXPECT_TRUE(rep.match);
  ASSERT_EQ(rep.recovered_hz.size(), 3u);
  EXPECT_EQ(rep.recovered_hz[0], 37.0);
  EXPECT_EQ(rep.recovered_hz[1], 420.0);
  EXPECT_EQ(rep.recovered_hz[2], 711.0);
  EXPECT_NEAR(rep.sample_ratio,
              192.0 / (3.0 * std::log(2048.0 / 3.0)), 1e-12);
}

TEST(ThreeTone, EquispacedSamplingAliases) {
  const ssp::ThreeToneReport rep = ssp::three_tone_demo(2048, 256, 3, true);
  EXPECT_TRUE(rep.equispaced);
  EXPECT_EQ(rep.sample_indices[0], 0);
  EXPECT_EQ(rep.sample_indices[1], 8);
  // 256 Hz sampling folds 420 and 711 Hz below Nyquist; the recovered trio
  // cannot be the true one.
  EXPECT_FALSE(rep.match);
  ASSERT_EQ(rep.recovered_hz.size(), 3u);
  EXPECT_NE(rep.recovered_hz, rep.true_hz);

  EXPECT_SSP_ERROR(ssp::three_tone_demo(2048, 100, 0, true),
                   ssp::errc::invalid_argument);
}

TEST(ThreeTone, SeedReproducible) {
  const ssp::ThreeToneReport a = ssp::three_tone_demo(2048, 128, 9, false);
  const ssp::ThreeToneReport b = ssp::three_tone_demo(2048, 128, 9, false);
  EXPECT_EQ(a.sample_indices, b.sample_indices);
  EXPECT_EQ(a.recovered_hz, b.recovered_hz);

  // Grids too coarse for the 711 Hz tone are refused.
  EXPECT_SSP_ERROR(ssp::three_tone_demo(512, 64, 0, false),
                   ssp::errc::invalid_argument);
}
