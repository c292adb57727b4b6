#include "ssp/reconstruct.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "ssp/factor.hpp"
#include "ssp/rng.hpp"

namespace ssp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Neumaier-compensated accumulator so sweep aggregates are insensitive to
// summation order and magnitude spread.
struct Kahan {
  double sum = 0, comp = 0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

double relative_error(const Eigen::VectorXd& approx,
                      const Eigen::VectorXd& truth) {
  const double denom = truth.norm();
  const double num = (approx - truth).norm();
  if (denom == 0.0)
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

Eigen::VectorXd lift(const TailoredBasis& basis, const Eigen::VectorXd& a) {
  Eigen::VectorXd x = basis.modes * a;
  if (basis.mean) x += *basis.mean;
  return x;
}

}  // namespace

ReconstructionResult gappy_reconstruct(const TailoredBasis& basis,
                                       const SensorSetRecord& sensors,
                                       const Eigen::VectorXd& y) {
  if (y.size() != sensors.p())
    fail(errc::dimension_mismatch,
         "gappy_reconstruct: " + std::to_string(y.size()) +
             " measurements for " + std::to_string(sensors.p()) + " sensors");
  require_finite(y, "gappy_reconstruct measurements");

  const Eigen::MatrixXd theta = sensor_rows(basis, sensors);
  Eigen::VectorXd rhs = y;
  if (basis.mean)
    for (Index i = 0; i < sensors.p(); ++i)
      rhs(i) -= (*basis.mean)(sensors.indices[static_cast<std::size_t>(i)] - 1);

  ReconstructionResult res;
  res.coeffs = least_squares_pinv(theta, rhs);
  res.state = lift(basis, res.coeffs);
  res.kappa = condition_number(theta);
  return res;
}

ReconstructionResult gappy_reconstruct(const TailoredBasis& basis,
                                       const SensorSetRecord& sensors,
                                       const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& truth) {
  if (truth.size() != basis.n())
    fail(errc::dimension_mismatch, "gappy_reconstruct: truth length mismatch");
  ReconstructionResult res = gappy_reconstruct(basis, sensors, y);
  res.rel_error = relative_error(res.state, truth);
  res.has_truth = true;
  return res;
}

Eigen::VectorXd add_measurement_noise(const Eigen::VectorXd& y,
                                      const NoiseModel& noise) {
  require_finite(y, "add_measurement_noise input");
  if (!(noise.eta >= 0.0))
    fail(errc::invalid_argument, "add_measurement_noise: eta must be >= 0");
  if (noise.eta == 0.0) return y;
  Rng rng(noise.seed);
  Eigen::VectorXd out = y;
  for (Index i = 0; i < out.size(); ++i) out(i) += noise.eta * rng.gaussian();
  return out;
}

CovarianceCheck coefficient_covariance_check(const Eigen::MatrixXd& theta,
                                             double eta, Index trials,
                                             std::uint64_t seed) {
  require_finite(theta, "coefficient_covariance_check");
  const Index p = theta.rows();
  const Index r = theta.cols();
  if (p < r)
    fail(errc::invalid_argument,
         "coefficient_covariance_check: need at least r sensors");
  if (!(eta > 0.0))
    fail(errc::invalid_argument, "coefficient_covariance_check: eta must be > 0");
  if (trials < 1)
    fail(errc::invalid_argument, "coefficient_covariance_check: trials must be >= 1");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(theta,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(p, r)) * kEps * s(0);
  if (s(r - 1) <= cutoff)
    fail(errc::singular_matrix,
         "coefficient_covariance_check: theta is rank deficient");

  CovarianceCheck chk;
  chk.eta = eta;
  chk.trials = trials;
  for (Index i = 0; i < r; ++i)
    chk.predicted_trace += eta * eta / (s(i) * s(i));

  // The estimation error a - a_hat = -pinv(theta) * noise does not depend
  // on the true coefficients, so simulate with a = 0.
  const Eigen::MatrixXd pinv =
      svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  Kahan acc;
  Eigen::VectorXd noise(p);
  for (Index t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    for (Index i = 0; i < p; ++i) noise(i) = eta * rng.gaussian();
    acc.add((pinv * noise).squaredNorm());
  }
  chk.empirical_trace = acc.value() / static_cast<double>(trials);
  chk.ratio = chk.empirical_trace / chk.predicted_trace;
  return chk;
}

CovarianceCheck coefficient_covariance_check(const TailoredBasis& basis,
                                             const SensorSetRecord& sensors,
                                             double eta, Index trials,
                                             std::uint64_t seed) {
  return coefficient_covariance_check(sensor_rows(basis, sensors), eta,
                                      trials, seed);
}

// ---- splitting ------------------------------------------------------------

std::pair<SnapshotMatrix, SnapshotMatrix> split_snapshots(
    const SnapshotMatrix& snapshots, const SplitRule& rule) {
  snapshots.validate();
  const Index m = snapshots.cols();
  if (m < 2)
    fail(errc::invalid_argument, "split_snapshots: need at least 2 snapshots");

  std::vector<Index> train_idx, test_idx;
  switch (rule.mode) {
    case SplitMode::chronological: {
      if (!(rule.train_fraction > 0.0) || !(rule.train_fraction < 1.0))
        fail(errc::invalid_argument,
             "split_snapshots: train fraction must lie in (0, 1)");
      const Index k = std::clamp<Index>(
          static_cast<Index>(std::llround(rule.train_fraction *
                                          static_cast<double>(m))),
          1, m - 1);
      for (Index j = 0; j < m; ++j)
        (j < k ? train_idx : test_idx).push_back(j);
      break;
    }
    case SplitMode::interleave: {
      if (rule.stride < 2)
        fail(errc::invalid_argument, "split_snapshots: stride must be >= 2");
      if (m < rule.stride)
        fail(errc::invalid_argument,
             "split_snapshots: fewer snapshots than the interleave stride");
      for (Index j = 0; j < m; ++j)
        ((j + 1) % rule.stride == 0 ? test_idx : train_idx).push_back(j);
      break;
    }
    case SplitMode::seeded_random: {
      if (!(rule.train_fraction > 0.0) || !(rule.train_fraction < 1.0))
        fail(errc::invalid_argument,
             "split_snapshots: train fraction must lie in (0, 1)");
      const Index k = std::clamp<Index>(
          static_cast<Index>(std::llround(rule.train_fraction *
                                          static_cast<double>(m))),
          1, m - 1);
      Rng rng(rule.seed);
      auto order = sample_without_replacement(m, m, rng);
      train_idx.assign(order.begin(), order.begin() + k);
      test_idx.assign(order.begin() + k, order.end());
      std::sort(train_idx.begin(), train_idx.end());
      std::sort(test_idx.begin(), test_idx.end());
      break;
    }
  }

  auto take = [&](const std::vector<Index>& cols) {
    SnapshotMatrix part;
    part.grid = snapshots.grid;
    part.values.resize(snapshots.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      part.values.col(static_cast<Index>(j)) = snapshots.values.col(cols[j]);
    return part;
  };
  return {take(train_idx), take(test_idx)};
}

// ---- sweeps ----------------------------------------------------------------

std::string to_string(SweepMethod m) {
  switch (m) {
    case SweepMethod::qr: return "qr";
    case SweepMethod::deim: return "deim";
    case SweepMethod::random: return "random";
    case SweepMethod::pod_projection: return "pod";
  }
  return "?";
}

std::string method_label(SweepMethod m, OversampleRule rule) {
  std::string label = to_string(m);
  // pod_projection ignores the oversampling rule (no sensing step).
  if (m != SweepMethod::pod_projection && rule == OversampleRule::p_equals_2r)
    label += "_p2r";
  return label;
}

namespace {

SensorSetRecord place_for_sweep(const TailoredBasis& basis, SweepMethod method,
                                OversampleRule rule, std::uint64_t seed) {
  const Index r = basis.rank();
  const Index p = rule == OversampleRule::p_equals_2r
                      ? std::min<Index>(2 * r, basis.n())
                      : r;
  switch (method) {
    case SweepMethod::qr:
      return select_qr_sensors(basis, p);
    case SweepMethod::deim:
      if (rule == OversampleRule::p_equals_2r)
        fail(errc::invalid_argument, "deim always places exactly rank sensors");
      return select_deim_sensors(basis);
    case SweepMethod::random:
      return select_random_sensors(basis.n(), p, seed);
    case SweepMethod::pod_projection:
      fail(errc::invalid_argument, "pod_projection places no sensors");
  }
  fail(errc::invalid_argument, "place_for_sweep: bad method");
}

Eigen::VectorXd sample_state(const Eigen::VectorXd& x,
                             const SensorSetRecord& sensors) {
  Eigen::VectorXd y(sensors.p());
  for (Index i = 0; i < sensors.p(); ++i)
    y(i) = x(sensors.indices[static_cast<std::size_t>(i)] - 1);
  return y;
}

}  // namespace

std::vector<RankSweepRow> sweep_rank(const SnapshotMatrix& train,
                                     const SnapshotMatrix& test,
                                     SweepMethod method,
                                     const std::vector<Index>& ranks,
                                     OversampleRule oversample,
                                     bool mean_subtract, std::uint64_t seed) {
  train.validate();
  test.validate();
  if (train.rows() != test.rows())
    fail(errc::dimension_mismatch,
         "sweep_rank: train and test state dimensions differ");
  if (ranks.empty())
    fail(errc::invalid_argument, "sweep_rank: no ranks requested");

  std::vector<RankSweepRow> rows;
  rows.reserve(ranks.size());
  for (std::size_t ri = 0; ri < ranks.size(); ++ri) {
    const Index r = ranks[ri];
    const TailoredBasis basis = fit_pod(train, RankSpec::fixed(r),
                                        mean_subtract);
    SensorSetRecord sensors;
    double kappa = 1.0;  // pod projection: orthonormal, condition 1
    if (method != SweepMethod::pod_projection) {
      sensors = place_for_sweep(basis, method, oversample,
                                derive_seed(seed, ri));
      kappa = condition_number(sensor_rows(basis, sensors));
    }

    Kahan err_sum, err_sq;
    for (Index t = 0; t < test.cols(); ++t) {
      const Eigen::VectorXd truth = test.values.col(t);
      double e;
      if (method == SweepMethod::pod_projection) {
        const Eigen::VectorXd a = project_coefficients(basis, truth);
        Eigen::VectorXd xhat = basis.modes * a;
        if (basis.mean) xhat += *basis.mean;
        e = relative_error(xhat, truth);
      } else {
        const ReconstructionResult res =
            gappy_reconstruct(basis, sensors, sample_state(truth, sensors),
                              truth);
        e = res.rel_error;
      }
      err_sum.add(e);
      err_sq.add(e * e);
    }
    const double nt = static_cast<double>(test.cols());
    RankSweepRow row;
    row.r = r;
    row.p = method == SweepMethod::pod_projection ? r : sensors.p();
    row.mean_rel_error = err_sum.value() / nt;
    row.std_rel_error =
        test.cols() > 1
            ? std::sqrt(std::max(
                  0.0, (err_sq.value() -
                        err_sum.value() * err_sum.value() / nt) /
                           (nt - 1.0)))
            : 0.0;
    row.mean_kappa = kappa;
    rows.push_back(row);
  }
  return rows;
}

NoiseSweepReport sweep_noise(const SnapshotMatrix& train,
                             const SnapshotMatrix& test, Index rank,
                             const std::vector<MethodSpec>& methods,
                             const std::vector<double>& etas,
                             bool mean_subtract, std::uint64_t seed) {
  train.validate();
  test.validate();
  if (train.rows() != test.rows())
    fail(errc::dimension_mismatch,
         "sweep_noise: train and test state dimensions differ");
  if (methods.empty() || etas.empty())
    fail(errc::invalid_argument, "sweep_noise: nothing to sweep");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (etas[i] < 0.0)
      fail(errc::invalid_argument, "sweep_noise: eta must be >= 0");
    if (i > 0 && etas[i] <= etas[i - 1])
      fail(errc::invalid_argument, "sweep_noise: etas must be increasing");
  }

  const TailoredBasis basis = fit_pod(train, RankSpec::fixed(rank),
                                      mean_subtract);
  NoiseSweepReport report;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const MethodSpec& spec = methods[mi];
    SensorSetRecord sensors;
    if (spec.method != SweepMethod::pod_projection)
      sensors = place_for_sweep(basis, spec.method, spec.oversample,
                                derive_seed(seed, 1000 + mi));

    double prev = -1.0;
    bool nondecreasing = true;
    for (std::size_t ei = 0; ei < etas.size(); ++ei) {
      const double eta = etas[ei];
      Kahan err_sum;
      for (Index t = 0; t < test.cols(); ++t) {
        const Eigen::VectorXd truth = test.values.col(t);
        const std::uint64_t noise_seed = derive_seed(
            seed, (static_cast<std::uint64_t>(mi) * etas.size() + ei) *
                          static_cast<std::uint64_t>(test.cols()) +
                      static_cast<std::uint64_t>(t) + 1);
        double e;
        if (spec.method == SweepMethod::pod_projection) {
          const Eigen::VectorXd noisy =
              add_measurement_noise(truth, NoiseModel{eta, noise_seed});
          const Eigen::VectorXd a = project_coefficients(basis, noisy);
          Eigen::VectorXd xhat = basis.modes * a;
          if (basis.mean) xhat += *basis.mean;
          e = relative_error(xhat, truth);
        } else {
          const Eigen::VectorXd y = add_measurement_noise(
              sample_state(truth, sensors), NoiseModel{eta, noise_seed});
          e = gappy_reconstruct(basis, sensors, y, truth).rel_error;
        }
        err_sum.add(e);
      }
      NoiseSweepRow row;
      row.method = spec.method;
      row.oversample = spec.oversample;
      row.eta = eta;
      row.mean_rel_error = err_sum.value() / static_cast<double>(test.cols());
      report.rows.push_back(row);
      if (ei > 0 && row.mean_rel_error < prev) nondecreasing = false;
      prev = row.mean_rel_error;
    }
    report.nondecreasing.push_back(nondecreasing);
  }
  return report;
}

std::string rank_sweep_csv(const std::vector<RankSweepRow>& rows) {
  std::string out = "r,p,mean_rel_error,std_rel_error,mean_kappa\n";
  for (const RankSweepRow& row : rows) {
    out += std::to_string(row.r) + "," + std::to_string(row.p) + "," +
           format_double(row.mean_rel_error) + "," +
           format_double(row.std_rel_error) + "," +
           format_double(row.mean_kappa) + "\n";
  }
  return out;
}

std::string noise_sweep_csv(const std::vector<NoiseSweepRow>& rows) {
  std::string out = "method,eta,mean_rel_error\n";
  for (const NoiseSweepRow& row : rows) {
    out += method_label(row.method, row.oversample) + "," +
           format_double(row.eta) + "," + format_double(row.mean_rel_error) +
           "\n";
  }
  return out;
}

// ---- interpolation demo -----------------------------------------------------

FeketeReport fekete_interpolation_demo(Index degree, Index grid_n) {
  if (degree < 1)
    fail(errc::invalid_argument, "fekete demo: degree must be >= 1");
  const Index r = degree + 1;
  if (grid_n < 2 * r)
    fail(errc::invalid_argument,
         "fekete demo: grid must have at least 2(degree+1) points");

  Eigen::VectorXd grid(grid_n);
  for (Index i = 0; i < grid_n; ++i)
    grid(i) = static_cast<double>(i) / static_cast<double>(grid_n - 1);
  const TailoredBasis basis = vandermonde_basis(grid, r);

  Eigen::VectorXd f(grid_n);
  for (Index i = 0; i < grid_n; ++i)
    f(i) = std::abs(grid(i) * grid(i) - 0.5);

  FeketeReport rep;
  rep.degree = degree;
  rep.grid_n = grid_n;

  // Approximate Fekete nodes: pivoted QR on the Vandermonde basis.
  const SensorSetRecord qr_sensors = select_qr_sensors(basis, r);
  rep.qr_points = qr_sensors.indices;
  {
    const ReconstructionResult res =
        gappy_reconstruct(basis, qr_sensors, sample_state(f, qr_sensors), f);
    rep.qr_sup_error = (res.state - f).lpNorm<Eigen::Infinity>();
    rep.qr_kappa = res.kappa;
  }

  // Naive equispaced nodes over the same grid.
  Eigen::MatrixXd theta_eq(r, r);
  Eigen::VectorXd y_eq(r);
  rep.equispaced_points.reserve(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) {
    const Index gi = static_cast<Index>(std::llround(
        static_cast<double>(i) * static_cast<double>(grid_n - 1) /
        static_cast<double>(r - 1)));
    rep.equispaced_points.push_back(gi + 1);
    theta_eq.row(i) = basis.modes.row(gi);
    y_eq(i) = f(gi);
  }
  {
    const Eigen::VectorXd c = least_squares_pinv(theta_eq, y_eq);
    const Eigen::VectorXd xhat = basis.modes * c;
    rep.equispaced_sup_error = (xhat - f).lpNorm<Eigen::Infinity>();
    rep.equispaced_kappa = condition_number(theta_eq);
  }

  rep.error_ratio = rep.equispaced_sup_error / rep.qr_sup_error;
  return rep;
}

}  // namespace ssp
