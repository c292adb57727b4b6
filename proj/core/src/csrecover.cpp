#include "ssp/csrecover.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "ssp/factor.hpp"
#include "ssp/rng.hpp"

namespace ssp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = 3.14159265358979323846264338327950288;

double dct_alpha(Index n, Index k) {
  return k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                : std::sqrt(2.0 / static_cast<double>(n));
}

}  // namespace

Eigen::VectorXd dct_analyze(const Eigen::VectorXd& x) {
  const Index n = x.size();
  if (n == 0) fail(errc::empty_matrix, "dct_analyze: empty signal");
  require_finite(x, "dct_analyze");
  Eigen::VectorXd s(n);
  for (Index k = 0; k < n; ++k) {
    double acc = 0.0;
    const double w = kPi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
    for (Index t = 0; t < n; ++t)
      acc += x(t) * std::cos(w * static_cast<double>(2 * t + 1));
    s(k) = dct_alpha(n, k) * acc;
  }
  return s;
}

Eigen::VectorXd dct_synthesize(const Eigen::VectorXd& s) {
  const Index n = s.size();
  if (n == 0) fail(errc::empty_matrix, "dct_synthesize: empty spectrum");
  require_finite(s, "dct_synthesize");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Index k = 0; k < n; ++k) {
    if (s(k) == 0.0) continue;
    const double a = dct_alpha(n, k) * s(k);
    const double w = kPi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
    for (Index t = 0; t < n; ++t)
      x(t) += a * std::cos(w * static_cast<double>(2 * t + 1));
  }
  return x;
}

Eigen::MatrixXd dct_synthesis_rows(Index n, const std::vector<Index>& rows) {
  if (n < 1) fail(errc::invalid_argument, "dct_synthesis_rows: n must be >= 1");
  Eigen::MatrixXd theta(static_cast<Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index t = rows[i];
    if (t < 0 || t >= n)
      fail(errc::index_out_of_range,
           "dct_synthesis_rows: row " + std::to_string(t) + " outside [0, " +
               std::to_string(n) + ")");
    for (Index k = 0; k < n; ++k)
      theta(static_cast<Index>(i), k) =
          dct_alpha(n, k) *
          std::cos(kPi * static_cast<double>(k) *
                   static_cast<double>(2 * t + 1) /
                   (2.0 * static_cast<double>(n)));
  }
  return theta;
}

SparseSolution omp_recover(const Eigen::MatrixXd& theta,
                           const Eigen::VectorXd& y, Index k_max, double tol) {
  require_finite(theta, "omp_recover");
  require_finite(y, "omp_recover rhs");
  const Index p = theta.rows();
  const Index n = theta.cols();
  if (p == 0 || n == 0) fail(errc::empty_matrix, "omp_recover: empty matrix");
  if (y.size() != p)
    fail(errc::dimension_mismatch, "omp_recover: rhs length mismatch");
  if (k_max < 0 || k_max > std::min(p, n))
    fail(errc::invalid_argument,
         "omp_recover: k_max must lie in [0, min(rows, cols)]");
  if (tol < 0.0) fail(errc::invalid_argument, "omp_recover: tol must be >= 0");

  Eigen::VectorXd col_norms(n);
  for (Index j = 0; j < n; ++j) {
    col_norms(j) = theta.col(j).norm();
    if (col_norms(j) == 0.0)
      fail(errc::zero_column,
           "omp_recover: column " + std::to_string(j + 1) + " is all zero");
  }

  SparseSolution sol;
  Eigen::VectorXd resid = y;
  sol.residual_norm = resid.norm();
  std::vector<bool> in_support(static_cast<std::size_t>(n), false);

  while (static_cast<Index>(sol.support.size()) < k_max &&
         sol.residual_norm > tol) {
    // Most-correlated unused column, normalized; ties -> lowest index.
    Index best = -1;
    double best_corr = 0.0;
    const Eigen::VectorXd corr = theta.transpose() * resid;
    for (Index j = 0; j < n; ++j) {
      if (in_support[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(corr(j)) / col_norms(j);
      if (c > best_corr) {
        best_corr = c;
        best = j;
      }
    }
    if (best < 0 || best_corr == 0.0) break;  // nothing left to explain y

    sol.support.push_back(best);
    in_support[static_cast<std::size_t>(best)] = true;

    Eigen::MatrixXd active(p, static_cast<Index>(sol.support.size()));
    for (std::size_t i = 0; i < sol.support.size(); ++i)
      active.col(static_cast<Index>(i)) = theta.col(sol.support[i]);
    sol.values = active.colPivHouseholderQr().solve(y);
    resid = y - active * sol.values;
    sol.residual_norm = resid.norm();
    sol.residual_history.push_back(sol.residual_norm);
  }
  return sol;
}

double incoherence(const SensorSetRecord& sensors,
                   const UniversalBasisSpec& basis) {
  sensors.validate();
  if (basis.kind != UniversalBasisSpec::Kind::dct)
    fail(errc::invalid_argument, "incoherence: unknown universal basis");
  if (basis.n != sensors.n)
    fail(errc::dimension_mismatch,
         "incoherence: basis size " + std::to_string(basis.n) +
             " != sensor state size " + std::to_string(sensors.n));
  std::vector<Index> rows0;
  rows0.reserve(sensors.indices.size());
  for (Index idx : sensors.indices) rows0.push_back(idx - 1);
  const Eigen::MatrixXd theta = dct_synthesis_rows(basis.n, rows0);
  return std::sqrt(static_cast<double>(basis.n)) *
         theta.cwiseAbs().maxCoeff();
}

double incoherence(const SensorSetRecord& sensors,
                   const TailoredBasis& basis) {
  sensors.validate();
  if (basis.n() != sensors.n)
    fail(errc::dimension_mismatch,
         "incoherence: basis has " + std::to_string(basis.n()) +
             " states, sensors index " + std::to_string(sensors.n));
  require_finite(basis.modes, "incoherence basis");
  double worst = 0.0;
  for (Index k = 0; k < basis.rank(); ++k) {
    const double norm = basis.modes.col(k).norm();
    if (norm == 0.0)
      fail(errc::zero_column,
           "incoherence: basis mode " + std::to_string(k + 1) + " is all zero");
    for (Index idx : sensors.indices)
      worst = std::max(worst, std::abs(basis.modes(idx - 1, k)) / norm);
  }
  return std::sqrt(static_cast<double>(sensors.n)) * worst;
}

double incoherence_fourier(const SensorSetRecord& sensors, Index n) {
  sensors.validate();
  if (n != sensors.n)
    fail(errc::dimension_mismatch, "incoherence_fourier: size mismatch");
  const double root_n = std::sqrt(static_cast<double>(n));
  double worst = 0.0;
  for (Index idx : sensors.indices) {
    const double t = static_cast<double>(idx - 1);
    for (Index j = 0; j < n; ++j) {
      const std::complex<double> e =
          std::polar(1.0 / root_n,
                     2.0 * kPi * static_cast<double>(j) * t /
                         static_cast<double>(n));
      worst = std::max(worst, std::abs(e));
    }
  }
  return root_n * worst;
}

SparseSolution basic_solution(const Eigen::MatrixXd& theta,
                              const Eigen::VectorXd& y) {
  require_finite(theta, "basic_solution");
  require_finite(y, "basic_solution rhs");
  const Index p = theta.rows();
  const Index n = theta.cols();
  if (p == 0 || n == 0) fail(errc::empty_matrix, "basic_solution: empty matrix");
  if (n <= p)
    fail(errc::invalid_argument,
         "basic_solution: system must be underdetermined (cols > rows)");
  if (y.size() != p)
    fail(errc::dimension_mismatch, "basic_solution: rhs length mismatch");

  // The pivot set comes from the matrix alone; y only enters the solve.
  const PivotedQrFactor fac = qr_pivot(theta, p);
  if (fac.rdiag(0) == 0.0)
    fail(errc::singular_matrix, "basic_solution: zero matrix");
  const double cutoff =
      static_cast<double>(std::max(p, n)) * kEps * fac.rdiag(0);
  Index rank = 0;
  while (rank < p && fac.rdiag(rank) > cutoff) ++rank;

  SparseSolution sol;
  sol.reduced_support = rank < p;
  sol.support.assign(fac.pivots.begin(), fac.pivots.begin() + rank);
  const Eigen::VectorXd qty = fac.q.leftCols(rank).transpose() * y;
  sol.values = fac.r_upper.topLeftCorner(rank, rank)
                   .triangularView<Eigen::Upper>()
                   .solve(qty);
  Eigen::VectorXd fitted = Eigen::VectorXd::Zero(p);
  for (Index i = 0; i < rank; ++i)
    fitted += sol.values(i) * theta.col(sol.support[static_cast<std::size_t>(i)]);
  sol.residual_norm = (y - fitted).norm();
  return sol;
}

ThreeToneReport three_tone_demo(Index n, Index p, std::uint64_t seed,
                                bool equispaced) {
  if (n < 2 || p < 1 || p > n)
    fail(errc::invalid_argument, "three_tone_demo: need 1 <= p <= n, n >= 2");
  // The 711 Hz tone occupies DCT bin 1422; a coarser grid would fold the
  // tones on the grid itself and the demo would measure the wrong thing.
  if (n < 1423)
    fail(errc::invalid_argument,
         "three_tone_demo: need n >= 1423 so all three tones fit on the grid");

  ThreeToneReport rep;
  rep.n = n;
  rep.p = p;
  rep.seed = seed;
  rep.equispaced = equispaced;
  rep.true_hz = {37.0, 420.0, 711.0};

  // The DCT-II atoms are cos(pi k t) sampled at the cell midpoints
  // t = (i + 0.5)/n, so a pure f Hz cosine over one second is exactly atom
  // k = 2f and recovery can be judged by exact bin identity.
  std::vector<Index> rows0;
  Eigen::MatrixXd theta;
  Eigen::VectorXd y(p);
  if (equispaced) {
    if (n % p != 0)
      fail(errc::invalid_argument,
           "three_tone_demo: equispaced sampling needs p to divide n");
    // Uniform sampling at p Hz reads the tones at t = i/p. Those instants sit
    // on the integer grid, one stride apart, where atoms k and k' with
    // k = +-k' (mod 2p) take identical values: the sampled dictionary carries
    // exact duplicates of each tone's column and the demo exhibits genuine
    // aliasing. (Offsetting onto the midpoints would leak sub-stride phase
    // and let the solver tell the aliases apart.)
    const Index stride = n / p;
    theta.resize(p, n);
    for (Index i = 0; i < p; ++i) {
      rows0.push_back(stride * i);
      const double t = static_cast<double>(stride * i) / static_cast<double>(n);
      for (Index k = 0; k < n; ++k)
        theta(i, k) =
            dct_alpha(n, k) * std::cos(kPi * static_cast<double>(k) * t);
      y(i) = 0.0;
      for (double f : rep.true_hz) y(i) += std::cos(2.0 * kPi * f * t);
    }
  } else {
    Rng rng(seed);
    auto draw = sample_without_replacement(n, p, rng);
    rows0.assign(draw.begin(), draw.end());
    std::sort(rows0.begin(), rows0.end());
    theta = dct_synthesis_rows(n, rows0);
    for (Index i = 0; i < p; ++i) {
      const double t = (static_cast<double>(rows0[static_cast<std::size_t>(i)]) +
                        0.5) /
                       static_cast<double>(n);
      y(i) = 0.0;
      for (double f : rep.true_hz) y(i) += std::cos(2.0 * kPi * f * t);
    }
  }
  rep.sample_indices = rows0;

  const SparseSolution sol =
      omp_recover(theta, y, 6, 1e-8 * y.norm());
  rep.residual_norm = sol.residual_norm;

  // Top three atoms by magnitude, reported in Hz (bin / 2), ascending.
  std::vector<std::pair<double, Index>> atoms;
  for (std::size_t i = 0; i < sol.support.size(); ++i)
    atoms.emplace_back(std::abs(sol.values(static_cast<Index>(i))),
                       sol.support[i]);
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const std::size_t keep = std::min<std::size_t>(3, atoms.size());
  for (std::size_t i = 0; i < keep; ++i)
    rep.recovered_hz.push_back(static_cast<double>(atoms[i].second) / 2.0);
  std::sort(rep.recovered_hz.begin(), rep.recovered_hz.end());
  rep.match = rep.recovered_hz == rep.true_hz;

  const double k_sparse = 3.0;
  rep.sample_ratio =
      static_cast<double>(p) /
      (k_sparse * std::log(static_cast<double>(n) / k_sparse));
  return rep;
}

}  // namespace ssp
