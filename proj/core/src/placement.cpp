#include "ssp/placement.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <set>

#include "ssp/factor.hpp"
#include "ssp/rng.hpp"

namespace ssp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr Index kGramLimit = 20000;
constexpr double kBruteLimit = 1e6;

void check_basis(const TailoredBasis& basis, bool reject_zero_columns) {
  if (basis.modes.rows() == 0 || basis.modes.cols() == 0)
    fail(errc::empty_matrix, "placement: empty basis");
  require_finite(basis.modes, "placement basis");
  if (!reject_zero_columns) return;
  for (Index k = 0; k < basis.rank(); ++k)
    if (basis.modes.col(k).norm() == 0.0)
      fail(errc::zero_column,
           "placement: basis mode " + std::to_string(k + 1) + " is all zero");
}

double eval_raw(const Eigen::MatrixXd& modes,
                const std::vector<Index>& rows0, PlacementCriterion crit) {
  const Index p = static_cast<Index>(rows0.size());
  const Index r = modes.cols();
  Eigen::MatrixXd theta(p, r);
  for (Index i = 0; i < p; ++i)
    theta.row(i) = modes.row(rows0[static_cast<std::size_t>(i)]);

  switch (crit) {
    case PlacementCriterion::a_optimal:
      return theta.squaredNorm();  // trace(Theta^T Theta)
    case PlacementCriterion::condition:
      return condition_number(theta);
    case PlacementCriterion::d_optimal: {
      if (p < r) return -std::numeric_limits<double>::infinity();
      Eigen::BDCSVD<Eigen::MatrixXd> svd(theta);
      const Eigen::VectorXd& s = svd.singularValues();
      const double cutoff =
          static_cast<double>(std::max(p, r)) * kEps * s(0);
      double logdet = 0.0;
      for (Index i = 0; i < s.size(); ++i) {
        if (s(i) <= cutoff) return -std::numeric_limits<double>::infinity();
        logdet += 2.0 * std::log(s(i));
      }
      return logdet;
    }
    case PlacementCriterion::e_optimal: {
      if (p < r) return 0.0;  // Theta^T Theta is rank deficient
      Eigen::BDCSVD<Eigen::MatrixXd> svd(theta);
      const double smin = svd.singularValues()(r - 1);
      return smin * smin;
    }
  }
  fail(errc::invalid_argument, "eval_raw: bad criterion");
}

}  // namespace

std::string to_string(PlacementCriterion c) {
  switch (c) {
    case PlacementCriterion::d_optimal: return "d";
    case PlacementCriterion::a_optimal: return "a";
    case PlacementCriterion::e_optimal: return "e";
    case PlacementCriterion::condition: return "condition";
  }
  return "?";
}

PlacementCriterion criterion_from_string(const std::string& s) {
  if (s == "d") return PlacementCriterion::d_optimal;
  if (s == "a") return PlacementCriterion::a_optimal;
  if (s == "e") return PlacementCriterion::e_optimal;
  if (s == "condition" || s == "cond") return PlacementCriterion::condition;
  fail(errc::invalid_argument, "unknown criterion '" + s + "'");
}

SensorSetRecord select_qr_sensors(const TailoredBasis& basis, Index p) {
  check_basis(basis, true);
  const Index n = basis.n();
  const Index r = basis.rank();
  if (p < r || p > n)
    fail(errc::invalid_argument,
         "select_qr_sensors: need rank <= p <= n_states (rank " +
             std::to_string(r) + ", p " + std::to_string(p) + ", n " +
             std::to_string(n) + ")");

  SensorSetRecord rec;
  rec.n = n;
  rec.r = r;
  if (p == r) {
    const PivotedQrFactor fac = qr_pivot(basis.modes.transpose(), p);
    rec.method = PlacementMethod::qr;
    rec.indices.reserve(static_cast<std::size_t>(p));
    for (Index piv : fac.pivots) rec.indices.push_back(piv + 1);
  } else {
    if (n > kGramLimit)
      fail(errc::combinatorial_guard,
           "select_qr_sensors: oversampling builds an n x n Gram matrix and "
           "n = " + std::to_string(n) + " exceeds " +
               std::to_string(kGramLimit) + "; downsample the grid first");
    const Eigen::MatrixXd gram = basis.modes * basis.modes.transpose();
    const PivotedQrFactor fac = qr_pivot(gram, p);
    rec.method = PlacementMethod::qr_oversampled;
    rec.indices.reserve(static_cast<std::size_t>(p));
    for (Index piv : fac.pivots) rec.indices.push_back(piv + 1);
  }
  rec.validate();
  return rec;
}

SensorSetRecord select_deim_sensors(const TailoredBasis& basis) {
  check_basis(basis, true);
  const Index n = basis.n();
  const Index r = basis.rank();

  std::vector<Index> picked;  // 0-based rows
  picked.reserve(static_cast<std::size_t>(r));
  std::set<Index> taken;

  for (Index k = 0; k < r; ++k) {
    Eigen::VectorXd resid;
    if (k == 0) {
      resid = basis.modes.col(0);
    } else {
      // Interpolate mode k on the sensors chosen so far, then take the
      // residual against the true mode.
      Eigen::MatrixXd c_psi(k, k);
      Eigen::VectorXd c_mode(k);
      for (Index i = 0; i < k; ++i) {
        c_psi.row(i) = basis.modes.row(picked[static_cast<std::size_t>(i)])
                           .head(k);
        c_mode(i) = basis.modes(picked[static_cast<std::size_t>(i)], k);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(c_psi);
      if (!lu.isInvertible())
        fail(errc::degenerate_interpolant,
             "select_deim_sensors: interpolation matrix singular at step " +
                 std::to_string(k + 1));
      resid = basis.modes.col(k) -
              basis.modes.leftCols(k) * lu.solve(c_mode);
    }
    Index imax = 0;
    const double vmax = resid.cwiseAbs().maxCoeff(&imax);
    if (vmax == 0.0 || taken.count(imax))
      fail(errc::degenerate_interpolant,
           "select_deim_sensors: residual vanished at step " +
               std::to_string(k + 1));
    picked.push_back(imax);
    taken.insert(imax);
  }

  SensorSetRecord rec;
  rec.n = n;
  rec.r = r;
  rec.method = PlacementMethod::deim;
  rec.indices.reserve(picked.size());
  for (Index idx : picked) rec.indices.push_back(idx + 1);
  rec.validate();
  return rec;
}

SensorSetRecord select_random_sensors(Index n, Index p, std::uint64_t seed) {
  if (n < 1 || p < 1 || p > n)
    fail(errc::invalid_argument,
         "select_random_sensors: need 1 <= p <= n (p " + std::to_string(p) +
             ", n " + std::to_string(n) + ")");
  Rng rng(seed);
  const auto rows0 = sample_without_replacement(n, p, rng);
  SensorSetRecord rec;
  rec.n = n;
  rec.r = 0;
  rec.method = PlacementMethod::random;
  rec.seed = seed;
  rec.indices.reserve(rows0.size());
  for (auto idx : rows0) rec.indices.push_back(static_cast<Index>(idx) + 1);
  rec.validate();
  return rec;
}

SensorSetRecord brute_force_optimal(const TailoredBasis& basis, Index p,
                                    PlacementCriterion criterion) {
  check_basis(basis, false);
  const Index n = basis.n();
  const Index r = basis.rank();
  if (p < 1 || p > n)
    fail(errc::invalid_argument, "brute_force_optimal: need 1 <= p <= n");
  if (p < r && criterion != PlacementCriterion::a_optimal)
    fail(errc::invalid_argument,
         "brute_force_optimal: p < rank makes every subset singular under "
         "this criterion");

  long double count = 1.0L;
  for (Index i = 1; i <= p; ++i) {
    count *= static_cast<long double>(n - p + i) / static_cast<long double>(i);
    if (count > kBruteLimit)
      fail(errc::combinatorial_guard,
           "brute_force_optimal: C(" + std::to_string(n) + ", " +
               std::to_string(p) + ") exceeds 1e6 subsets");
  }

  const bool minimize = criterion == PlacementCriterion::condition;
  std::vector<Index> cur(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) cur[static_cast<std::size_t>(i)] = i;
  std::vector<Index> best = cur;
  double best_val = eval_raw(basis.modes, cur, criterion);

  // Lexicographic enumeration; strict improvement keeps the first (and thus
  // lexicographically smallest) optimum.
  while (true) {
    Index i = p - 1;
    while (i >= 0 &&
           cur[static_cast<std::size_t>(i)] == n - p + i)
      --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < p; ++j)
      cur[static_cast<std::size_t>(j)] =
          cur[static_cast<std::size_t>(j - 1)] + 1;
    const double val = eval_raw(basis.modes, cur, criterion);
    if (minimize ? val < best_val : val > best_val) {
      best_val = val;
      best = cur;
    }
  }

  SensorSetRecord rec;
  rec.n = n;
  rec.r = r;
  rec.method = PlacementMethod::brute_force;
  rec.indices.reserve(best.size());
  for (Index idx : best) rec.indices.push_back(idx + 1);
  rec.validate();
  return rec;
}

Eigen::MatrixXd sensor_rows(const TailoredBasis& basis,
                            const SensorSetRecord& sensors) {
  sensors.validate();
  if (sensors.n != basis.n())
    fail(errc::dimension_mismatch,
         "sensor set indexes " + std::to_string(sensors.n) +
             " states, basis has " + std::to_string(basis.n()));
  Eigen::MatrixXd theta(sensors.p(), basis.rank());
  for (Index i = 0; i < sensors.p(); ++i)
    theta.row(i) =
        basis.modes.row(sensors.indices[static_cast<std::size_t>(i)] - 1);
  return theta;
}

double evaluate_criterion(const TailoredBasis& basis,
                          const SensorSetRecord& sensors,
                          PlacementCriterion criterion) {
  check_basis(basis, false);
  sensors.validate();
  if (sensors.n != basis.n())
    fail(errc::dimension_mismatch,
         "sensor set indexes " + std::to_string(sensors.n) +
             " states, basis has " + std::to_string(basis.n()));
  std::vector<Index> rows0;
  rows0.reserve(sensors.indices.size());
  for (Index idx : sensors.indices) rows0.push_back(idx - 1);
  return eval_raw(basis.modes, rows0, criterion);
}

}  // namespace ssp
