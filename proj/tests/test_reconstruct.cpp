#include "ssp/reconstruct.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "testutil.hpp"

using ssp::Index;
using ssp::RankSpec;
using ssp::SnapshotMatrix;
using ssptest::gaussian_matrix;
using ssptest::random_orthonormal;

namespace {

// Snapshots confined to a known r-dimensional affine subspace.  Separate
// seeds let several matrices share one subspace with fresh coefficients.
SnapshotMatrix planted_snapshots(Index n, Index m, Index r,
                                 std::uint64_t frame_seed,
                                 std::uint64_t coeff_seed, bool with_offset) {
  const Eigen::MatrixXd frame = random_orthonormal(n, r, frame_seed);
  Eigen::MatrixXd coeffs = gaussian_matrix(r, m, coeff_seed);
  for (Index i = 0; i < r; ++i)
    coeffs.row(i) *= static_cast<double>(r - i);  // graded energies
  SnapshotMatrix s;
  s.values = frame * coeffs;
  if (with_offset)
    s.values.colwise() += Eigen::VectorXd::Constant(n, 3.0).eval();
  return s;
}

}  // namespace

TEST(Gappy, ExactOnInSpanData) {
  const SnapshotMatrix snaps = planted_snapshots(30, 12, 4, 2, 102, false);
  const ssp::TailoredBasis basis =
      ssp::fit_pod(snaps, RankSpec::fixed(4), false);
  const ssp::SensorSetRecord sensors = ssp::select_qr_sensors(basis, 4);

  const Eigen::VectorXd truth = snaps.values.col(0);
  Eigen::VectorXd y(sensors.p());
  for (Index i = 0; i < sensors.p(); ++i)
    y(i) = truth(sensors.indices[static_cast<std::size_t>(i)] - 1);

  const ssp::ReconstructionResult res =
      ssp::gappy_reconstruct(basis, sensors, y, truth);
  EXPECT_TRUE(res.has_truth);
  EXPECT_LT(res.rel_error, 1e-10);
  EXPECT_LT((res.state - truth).norm(), 1e-9 * truth.norm());
  EXPECT_GE(res.kappa, 1.0);
  // Coefficients agree with direct projection.
  EXPECT_LT((res.coeffs - ssp::project_coefficients(basis, truth)).norm(),
            1e-9);
}

TEST(Gappy, ExactWithMeanSubtraction) {
  const SnapshotMatrix snaps = planted_snapshots(25, 10, 3, 5, 105, true);
  const ssp::TailoredBasis basis =
      ssp::fit_pod(snaps, RankSpec::fixed(3), true);
  const ssp::SensorSetRecord sensors = ssp::select_qr_sensors(basis, 3);

  const Eigen::VectorXd truth = snaps.values.col(7);
  Eigen::VectorXd y(3);
  for (Index i = 0; i < 3; ++i)
    y(i) = truth(sensors.indices[static_cast<std::size_t>(i)] - 1);
  const ssp::ReconstructionResult res =
      ssp::gappy_reconstruct(basis, sensors, y, truth);
  EXPECT_LT(res.rel_error, 1e-8);
}

TEST(Gappy, OversamplingUsesLeastSquares) {
  const SnapshotMatrix snaps = planted_snapshots(40, 20, 3, 11, 111, false);
  const ssp::TailoredBasis basis =
      ssp::fit_pod(snaps, RankSpec::fixed(3), false);
  const ssp::SensorSetRecord sensors = ssp::select_qr_sensors(basis, 6);
  ASSERT_EQ(sensors.p(), 6);

  const Eigen::VectorXd truth = snaps.values.col(1);
  Eigen::VectorXd y(6);
  for (Index i = 0; i < 6; ++i)
    y(i) = truth(sensors.indices[static_cast<std::size_t>(i)] - 1);
  const ssp::ReconstructionResult res =
      ssp::gappy_reconstruct(basis, sensors, y, truth);
  EXPECT_LT(res.rel_error, 1e-10);
}

TEST(Gappy, DimensionChecks) {
  const SnapshotMatrix snaps = planted_snapshots(20, 8, 2, 13, 113, false);
  const ssp::TailoredBasis basis =
      ssp::fit_pod(snaps, RankSpec::fixed(2), false);
  const ssp::SensorSetRecord sensors = ssp::select_qr_sensors(basis, 2);
  EXPECT_SSP_ERROR(
      ssp::gappy_reconstruct(basis, sensors, Eigen::VectorXd::Ones(3)),
      ssp::errc::dimension_mismatch);
  ssp::SensorSetRecord wrong = sensors;
  wrong.n = 21;
  wrong.indices[0] = 21;
  EXPECT_SSP_ERROR(
      ssp::gappy_reconstruct(basis, wrong, Eigen::VectorXd::Ones(2)),
      ssp::errc::dimension_mismatch);
}

TEST(Noise, SeededGaussianStatistics) {
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(10000);
  const Eigen::VectorXd noisy =
      ssp::add_measurement_noise(y, ssp::NoiseModel{1.0, 42});
  EXPECT_NEAR(noisy.mean(), 0.0, 0.05);
  EXPECT_NEAR(noisy.squaredNorm() / 10000.0, 1.0, 0.06);

  const Eigen::VectorXd again =
      ssp::add_measurement_noise(y, ssp::NoiseModel{1.0, 42});
  EXPECT_EQ(noisy, again);

  EXPECT_EQ(ssp::add_measurement_noise(y, ssp::NoiseModel{0.0, 42}), y);
  EXPECT_SSP_ERROR(ssp::add_measurement_noise(y, ssp::NoiseModel{-1.0, 0}),
                   ssp::errc::invalid_argument);
}

TEST(Covariance, IdentityThetaMatchesLaw) {
  const ssp::CovarianceCheck chk = ssp::coefficient_covariance_check(
      Eigen::MatrixXd::Identity(2, 2), 1.0, 10000, 7);
  EXPECT_DOUBLE_EQ(chk.predicted_trace, 2.0);
  EXPECT_NEAR(chk.ratio, 1.0, 0.05);
}

TEST(Covariance, ScalesWithEtaSquared) {
  const Eigen::MatrixXd theta = gaussian_matrix(12, 4, 19);
  const ssp::CovarianceCheck a =
      ssp::coefficient_covariance_check(theta, 0.1, 2000, 3);
  const ssp::CovarianceCheck b =
      ssp::coefficient_covariance_check(theta, 0.2, 2000, 3);
  // Identical noise streams scaled by eta: the ratio is exactly preserved.
  EXPECT_NEAR(b.predicted_trace / a.predicted_trace, 4.0, 1e-12);
  EXPECT_NEAR(b.empirical_trace / a.empirical_trace, 4.0, 1e-10);
}

TEST(Covariance, RejectsDegenerateProblems) {
  EXPECT_SSP_ERROR(ssp::coefficient_covariance_check(
                       Eigen::MatrixXd::Identity(2, 2), 0.0, 10, 0),
                   ssp::errc::invalid_argument);
  EXPECT_SSP_ERROR(ssp::coefficient_covariance_check(
                       Eigen::MatrixXd::Ones(3, 2), 1.0, 10, 0),
                   ssp::errc::singular_matrix);  // rank 1
  EXPECT_SSP_ERROR(ssp::coefficient_covariance_check(
                       gaussian_matrix(2, 3, 1), 1.0, 10, 0),
                   ssp::errc::invalid_argument);  // p < r
}

TEST(Split, Chronological) {
  SnapshotMatrix snaps;
  snaps.values = gaussian_matrix(4, 9, 23);
  ssp::SplitRule rule;
  rule.mode = ssp::SplitMode::chronological;
  rule.train_fraction = 2.0 / 3.0;
  const auto [train, test] = ssp::split_snapshots(snaps, rule);
  ASSERT_EQ(train.cols(), 6);
  ASSERT_EQ(test.cols(), 3);
  EXPECT_EQ(train.values, snaps.values.leftCols(6));
  EXPECT_EQ(test.values, snaps.values.rightCols(3));
}

TEST(Split, Interleave) {
  SnapshotMatrix snaps;
  snaps.values = gaussian_matrix(3, 10, 29);
  ssp::SplitRule rule;
  rule.mode = ssp::SplitMode::interleave;
  rule.stride = 4;
  const auto [train, test] = ssp::split_snapshots(snaps, rule);
  ASSERT_EQ(test.cols(), 2);  // snapshots 4 and 8
  EXPECT_EQ(test.values.col(0), snaps.values.col(3));
  EXPECT_EQ(test.values.col(1), snaps.values.col(7));
  ASSERT_EQ(train.cols(), 8);
  EXPECT_EQ(train.values.col(3), snaps.values.col(4));
}

TEST(Split, SeededRandomPartitions) {
  SnapshotMatrix snaps;
  snaps.values = gaussian_matrix(3, 12, 31);
  ssp::SplitRule rule;
  rule.mode = ssp::SplitMode::seeded_random;
  rule.train_fraction = 0.5;
  rule.seed = 5;
  const auto [train, test] = ssp::split_snapshots(snaps, rule);
  EXPECT_EQ(train.cols(), 6);
  EXPECT_EQ(test.cols(), 6);

  // Same seed reproduces, and together they cover every column once.
  const auto [train2, test2] = ssp::split_snapshots(snaps, rule);
  EXPECT_EQ(train.values, train2.values);
  std::set<double> firsts;
  for (Index j = 0; j < 6; ++j) {
    firsts.insert(train.values(0, j));
    firsts.insert(test.values(0, j));
  }
  EXPECT_EQ(firsts.size(), 12u);
}

TEST(Split, Validation) {
  SnapshotMatrix snaps;
  snaps.values = gaussian_matrix(3, 5, 37);
  ssp::SplitRule rule;
  rule.train_fraction = 1.0;
  EXPECT_SSP_ERROR(ssp::split_snapshots(snaps, rule),
                   ssp::errc::invalid_argument);
  rule = {};
  rule.mode = ssp::SplitMode::interleave;
  rule.stride = 9;
  EXPECT_SSP_ERROR(ssp::split_snapshots(snaps, rule),
                   ssp::errc::invalid_argument);
  snaps.values = gaussian_matrix(3, 1, 38);
  EXPECT_SSP_ERROR(ssp::split_snapshots(snaps, ssp::SplitRule{}),
                   ssp::errc::invalid_argument);
}

TEST(SweepRank, ErrorsShrinkTowardPlantedRank) {
  const SnapshotMatrix train = planted_snapshots(24, 16, 3, 41, 141, false);
  const SnapshotMatrix test = planted_snapshots(24, 7, 3, 41, 142, false);

  const std::vector<Index> ranks = {1, 2, 3};
  const auto qr_rows =
      ssp::sweep_rank(train, test, ssp::SweepMethod::qr, ranks,
                      ssp::OversampleRule::p_equals_r, false, 101);
  ASSERT_EQ(qr_rows.size(), 3u);
  EXPECT_EQ(qr_rows[2].r, 3);
  EXPECT_EQ(qr_rows[2].p, 3);
  EXPECT_LT(qr_rows[2].mean_rel_error, 1e-8);
  EXPECT_GT(qr_rows[0].mean_rel_error, qr_rows[2].mean_rel_error);

  // Projection is the floor: no placement can beat it at the same rank.
  const auto pod_rows =
      ssp::sweep_rank(train, test, ssp::SweepMethod::pod_projection, ranks,
                      ssp::OversampleRule::p_equals_r, false, 101);
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    EXPECT_LE(pod_rows[i].mean_rel_error,
              qr_rows[i].mean_rel_error + 1e-12);
    EXPECT_DOUBLE_EQ(pod_rows[i].mean_kappa, 1.0);
  }
}

TEST(SweepRank, OversampledColumnReportsP) {
  const SnapshotMatrix train = planted_snapshots(30, 14, 2, 43, 143, false);
  const SnapshotMatrix test = planted_snapshots(30, 4, 2, 43, 144, false);
  const auto rows =
      ssp::sweep_rank(train, test, ssp::SweepMethod::qr, {2},
                      ssp::OversampleRule::p_equals_2r, false, 7);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].p, 4);
}

TEST(SweepRank, RandomMethodIsSeedDeterministic) {
  const SnapshotMatrix train = planted_snapshots(30, 14, 2, 47, 147, false);
  const SnapshotMatrix test = planted_snapshots(30, 4, 2, 47, 148, false);
  const auto a = ssp::sweep_rank(train, test, ssp::SweepMethod::random, {1, 2},
                                 ssp::OversampleRule::p_equals_r, false, 9);
  const auto b = ssp::sweep_rank(train, test, ssp::SweepMethod::random, {1, 2},
                                 ssp::OversampleRule::p_equals_r, false, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_DOUBLE_EQ(a[i].mean_rel_error, b[i].mean_rel_error);
    EXPECT_DOUBLE_EQ(a[i].mean_kappa, b[i].mean_kappa);
  }
}

TEST(SweepNoise, NoiseHurtsMonotonically) {
  const SnapshotMatrix train = planted_snapshots(26, 18, 3, 51, 151, false);
  const SnapshotMatrix test = planted_snapshots(26, 6, 3, 51, 152, false);
  const std::vector<ssp::MethodSpec> methods = {
      {ssp::SweepMethod::qr, ssp::OversampleRule::p_equals_r},
      {ssp::SweepMethod::qr, ssp::OversampleRule::p_equals_2r},
      {ssp::SweepMethod::deim, ssp::OversampleRule::p_equals_r},
      {ssp::SweepMethod::pod_projection, ssp::OversampleRule::p_equals_r},
  };
  const ssp::NoiseSweepReport rep = ssp::sweep_noise(
      train, test, 3, methods, {0.0, 0.05, 0.2}, false, 61);
  ASSERT_EQ(rep.rows.size(), methods.size() * 3);
  ASSERT_EQ(rep.nondecreasing.size(), methods.size());
  for (bool flag : rep.nondecreasing) EXPECT_TRUE(flag);
  // Noise-free reconstruction of in-span data is exact for every method.
  for (std::size_t mi = 0; mi < methods.size(); ++mi)
    EXPECT_LT(rep.rows[mi * 3].mean_rel_error, 1e-8);

  EXPECT_SSP_ERROR(
      ssp::sweep_noise(train, test, 3, methods, {0.1, 0.1}, false, 1),
      ssp::errc::invalid_argument);
}

TEST(SweepCsv, StableHeader) {
  std::vector<ssp::RankSweepRow> rows(1);
  rows[0] = {4, 8, 0.25, 0.5, 3.0};
  const std::string csv = ssp::rank_sweep_csv(rows);
  EXPECT_EQ(csv, "r,p,mean_rel_error,std_rel_error,mean_kappa\n4,8,0.25,0.5,3\n");

  std::vector<ssp::NoiseSweepRow> nrows(1);
  nrows[0].method = ssp::SweepMethod::qr;
  nrows[0].oversample = ssp::OversampleRule::p_equals_2r;
  nrows[0].eta = 0.1;
  nrows[0].mean_rel_error = 0.5;
  EXPECT_EQ(ssp::noise_sweep_csv(nrows),
            "method,eta,mean_rel_error\nqr_p2r,0.1,0.5\n");
}

TEST(Fekete, QrNodesInterpolateStably) {
  const ssp::FeketeReport rep = ssp::fekete_interpolation_demo(8, 200);
  EXPECT_EQ(rep.degree, 8);
  ASSERT_EQ(rep.qr_points.size(), 9u);
  ASSERT_EQ(rep.equispaced_points.size(), 9u);

  std::set<Index> uniq(rep.qr_points.begin(), rep.qr_points.end());
  EXPECT_EQ(uniq.size(), 9u);
  EXPECT_EQ(rep.equispaced_points.front(), 1);
  EXPECT_EQ(rep.equispaced_points.back(), 200);

  EXPECT_TRUE(std::isfinite(rep.qr_sup_error));
  EXPECT_TRUE(std::isfinite(rep.equispaced_sup_error));
  EXPECT_GT(rep.qr_kappa, 1.0);
  EXPECT_GT(rep.error_ratio, 0.0);

  EXPECT_SSP_ERROR(ssp::fekete_interpolation_demo(8, 17),
                   ssp::errc::invalid_argument);
}
