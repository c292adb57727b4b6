#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ssp/basis.hpp"
#include "ssp/matrixio.hpp"
#include "ssp/placement.hpp"

namespace ssp {

struct ReconstructionResult {
  Eigen::VectorXd coeffs;   // estimated basis coefficients (r)
  Eigen::VectorXd state;    // reconstructed full state (n)
  double kappa = 0;         // condition number of Theta
  double rel_error = -1;    // ||state - truth|| / ||truth||; -1 if no truth
  bool has_truth = false;
};

struct NoiseModel {
  double eta = 0;           // std dev of iid Gaussian measurement noise
  std::uint64_t seed = 0;
};

// Gappy reconstruction: solve Theta a = y - C mean in least squares
// (minimum-norm pseudoinverse), then lift x_hat = modes a + mean.
ReconstructionResult gappy_reconstruct(const TailoredBasis& basis,
                                       const SensorSetRecord& sensors,
                                       const Eigen::VectorXd& y);
ReconstructionResult gappy_reconstruct(const TailoredBasis& basis,
                                       const SensorSetRecord& sensors,
                                       const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& truth);

Eigen::VectorXd add_measurement_noise(const Eigen::VectorXd& y,
                                      const NoiseModel& noise);

// Monte Carlo check of the error-covariance law for least squares under
// iid Gaussian noise of variance eta^2: cov(a - a_hat) = eta^2 (Theta^T
// Theta)^-1, compared through the trace.
struct CovarianceCheck {
  double predicted_trace = 0;  // eta^2 * trace((Theta^T Theta)^-1)
  double empirical_trace = 0;  // mean_t ||a - a_hat_t||^2
  double ratio = 0;            // empirical / predicted
  Index trials = 0;
  double eta = 0;
};

CovarianceCheck coefficient_covariance_check(const Eigen::MatrixXd& theta,
                                             double eta, Index trials,
                                             std::uint64_t seed);
CovarianceCheck coefficient_covariance_check(const TailoredBasis& basis,
                                             const SensorSetRecord& sensors,
                                             double eta, Index trials,
                                             std::uint64_t seed);

// ---- train/test splitting ---------------------------------------------

enum class SplitMode { chronological, interleave, seeded_random };

struct SplitRule {
  SplitMode mode = SplitMode::chronological;
  double train_fraction = 2.0 / 3.0;  // chronological, seeded_random
  Index stride = 4;                   // interleave: every stride-th is test
  std::uint64_t seed = 0;             // seeded_random
};

// Returns (train, test); both parts keep the original column order and are
// guaranteed nonempty.
std::pair<SnapshotMatrix, SnapshotMatrix> split_snapshots(
    const SnapshotMatrix& snapshots, const SplitRule& rule);

// ---- parameter sweeps ---------------------------------------------------

enum class SweepMethod { qr, deim, random, pod_projection };

enum class OversampleRule { p_equals_r, p_equals_2r };

std::string to_string(SweepMethod m);
std::string method_label(SweepMethod m, OversampleRule rule);

struct RankSweepRow {
  Index r = 0;
  Index p = 0;
  double mean_rel_error = 0;
  double std_rel_error = 0;  // sample std over test snapshots
  double mean_kappa = 0;
};

// Fit a basis per rank on `train`, place sensors by `method`, reconstruct
// every test snapshot from its own sampled values, and aggregate errors
// (compensated summation, so row values do not depend on accumulation
// luck).  pod_projection skips sensing and projects exactly: the best any
// placement could do at that rank.
std::vector<RankSweepRow> sweep_rank(const SnapshotMatrix& train,
                                     const SnapshotMatrix& test,
                                     SweepMethod method,
                                     const std::vector<Index>& ranks,
                                     OversampleRule oversample,
                                     bool mean_subtract, std::uint64_t seed);

struct NoiseSweepRow {
  SweepMethod method = SweepMethod::qr;
  OversampleRule oversample = OversampleRule::p_equals_r;
  double eta = 0;
  double mean_rel_error = 0;
};

struct MethodSpec {
  SweepMethod method = SweepMethod::qr;
  OversampleRule oversample = OversampleRule::p_equals_r;
};

struct NoiseSweepReport {
  std::vector<NoiseSweepRow> rows;
  // per method (same order as the input specs): mean error nondecreasing
  // in eta?  Recorded rather than enforced; noise should hurt.
  std::vector<bool> nondecreasing;
};

NoiseSweepReport sweep_noise(const SnapshotMatrix& train,
                             const SnapshotMatrix& test, Index rank,
                             const std::vector<MethodSpec>& methods,
                             const std::vector<double>& etas,
                             bool mean_subtract, std::uint64_t seed);

// CSV renderings (one header line, then one line per row).
std::string rank_sweep_csv(const std::vector<RankSweepRow>& rows);
std::string noise_sweep_csv(const std::vector<NoiseSweepRow>& rows);

// ---- polynomial interpolation demo --------------------------------------

// Interpolate f(x) = |x^2 - 1/2| on an equispaced grid over [0, 1] with a
// degree-`degree` polynomial, comparing QR-selected nodes (approximate
// Fekete points) against naively equispaced nodes.
struct FeketeReport {
  Index degree = 0;
  Index grid_n = 0;
  std::vector<Index> qr_points;          // 1-based grid indices
  std::vector<Index> equispaced_points;  // 1-based grid indices
  double qr_sup_error = 0;
  double equispaced_sup_error = 0;
  double error_ratio = 0;  // equispaced / qr
  double qr_kappa = 0;
  double equispaced_kappa = 0;
};

FeketeReport fekete_interpolation_demo(Index degree, Index grid_n);

}  // namespace ssp
