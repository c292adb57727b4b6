#include "ssp/factor.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numeric>

namespace ssp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Householder reflector for x with v(0) scaled to 1: H = I - beta v v^T
// maps x onto +||x|| e_1.  The v(0) formula avoids cancellation for
// positive leading entries (standard dlarfg trick).
struct Reflector {
  double beta = 0;
  double rkk = 0;
};

Reflector make_reflector(Eigen::Ref<Eigen::VectorXd> x) {
  const Index m = x.size();
  const double alpha = x(0);
  const double sigma = m > 1 ? x.tail(m - 1).squaredNorm() : 0.0;
  Reflector h;
  if (sigma == 0.0) {
    // Already triangular in this column.  A negative alpha still needs a
    // sign flip so r_kk = |alpha| = ||x||.
    h.rkk = std::abs(alpha);
    h.beta = alpha < 0.0 ? 2.0 : 0.0;
    x(0) = 1.0;
    return h;
  }
  const double mu = std::sqrt(alpha * alpha + sigma);
  const double v0 = alpha <= 0.0 ? alpha - mu : -sigma / (alpha + mu);
  h.beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
  h.rkk = mu;
  x.tail(m - 1) /= v0;
  x(0) = 1.0;
  return h;
}

void apply_reflector(const Eigen::VectorXd& v, double beta,
                     Eigen::Ref<Eigen::MatrixXd> block) {
  if (beta == 0.0 || block.cols() == 0) return;
  Eigen::RowVectorXd vt_block = v.transpose() * block;
  block.noalias() -= beta * v * vt_block;
}

}  // namespace

PivotedQrFactor qr_pivot(const Eigen::MatrixXd& b, Index p) {
  require_finite(b, "qr_pivot");
  const Index rows = b.rows();
  const Index cols = b.cols();
  if (rows == 0 || cols == 0) fail(errc::empty_matrix, "qr_pivot: empty matrix");
  if (p < 1 || p > cols)
    fail(errc::invalid_argument,
         "qr_pivot: pivot count " + std::to_string(p) +
             " outside [1, " + std::to_string(cols) + "]");

  Eigen::MatrixXd w = b;
  std::vector<Index> perm(static_cast<std::size_t>(cols));
  std::iota(perm.begin(), perm.end(), Index{0});

  // Running squared column norms plus the reference value they were last
  // computed from; when downdating has eaten more than ~half the digits we
  // recompute from the matrix instead of trusting the running value.
  Eigen::VectorXd norms2(cols), ref2(cols);
  for (Index j = 0; j < cols; ++j) norms2(j) = w.col(j).squaredNorm();
  ref2 = norms2;
  const double recompute_tol = std::sqrt(kEps);

  const Index kq = std::min(p, rows);  // number of reflectors we can form
  Eigen::VectorXd rdiag = Eigen::VectorXd::Zero(p);
  std::vector<double> betas(static_cast<std::size_t>(kq), 0.0);

  for (Index k = 0; k < p; ++k) {
    // Pivot: largest remaining norm, ties to the lowest original index.
    Index best = k;
    for (Index j = k + 1; j < cols; ++j)
      if (norms2(j) > norms2(best) ||
          (norms2(j) == norms2(best) &&
           perm[static_cast<std::size_t>(j)] <
               perm[static_cast<std::size_t>(best)]))
        best = j;
    if (best != k) {
      w.col(k).swap(w.col(best));
      std::swap(perm[static_cast<std::size_t>(k)],
                perm[static_cast<std::size_t>(best)]);
      std::swap(norms2(k), norms2(best));
      std::swap(ref2(k), ref2(best));
    }

    if (k >= rows) continue;  // no rows left: rdiag stays 0, pivot recorded

    auto col = w.col(k).tail(rows - k);
    const Reflector h = make_reflector(col);
    betas[static_cast<std::size_t>(k)] = h.beta;
    rdiag(k) = h.rkk;

    if (k + 1 < cols) {
      const Eigen::VectorXd v = w.col(k).tail(rows - k);
      apply_reflector(v, h.beta,
                      w.block(k, k + 1, rows - k, cols - k - 1));
      for (Index j = k + 1; j < cols; ++j) {
        norms2(j) -= w(k, j) * w(k, j);
        if (norms2(j) < recompute_tol * ref2(j)) {
          norms2(j) = k + 1 < rows
                          ? w.col(j).tail(rows - k - 1).squaredNorm()
                          : 0.0;
          ref2(j) = norms2(j);
        }
      }
    }
    w(k, k) = h.rkk;  // v(0) was parked here; restore the R entry
  }

  PivotedQrFactor f;
  f.pivots.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(p));
  f.perm = std::move(perm);
  f.rdiag = rdiag;

  // Q = H_0 ... H_{kq-1} applied to the first kq columns of the identity.
  f.q = Eigen::MatrixXd::Identity(rows, kq);
  for (Index k = kq - 1; k >= 0; --k) {
    if (betas[static_cast<std::size_t>(k)] == 0.0) continue;
    Eigen::VectorXd v(rows - k);
    v(0) = 1.0;
    if (rows - k > 1) v.tail(rows - k - 1) = w.col(k).tail(rows - k - 1);
    apply_reflector(v, betas[static_cast<std::size_t>(k)],
                    f.q.block(k, 0, rows - k, kq));
  }

  f.r_upper = w.topRows(kq).triangularView<Eigen::Upper>();
  return f;
}

SvdFactor truncated_svd(const Eigen::MatrixXd& x, Index r) {
  require_finite(x, "truncated_svd");
  if (x.rows() == 0 || x.cols() == 0)
    fail(errc::empty_matrix, "truncated_svd: empty matrix");
  const Index rmax = std::min(x.rows(), x.cols());
  if (r < 1 || r > rmax)
    fail(errc::infeasible_rank,
         "truncated_svd: rank " + std::to_string(r) + " outside [1, " +
             std::to_string(rmax) + "]");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactor f;
  f.modes = svd.matrixU().leftCols(r);
  f.sigmas = svd.singularValues().head(r);
  f.right = svd.matrixV().leftCols(r);

  // Sign convention: largest-magnitude entry of each mode is nonnegative
  // (first such entry wins ties), compensated in the right factor.
  for (Index k = 0; k < r; ++k) {
    Index imax = 0;
    f.modes.col(k).cwiseAbs().maxCoeff(&imax);
    if (f.modes(imax, k) < 0.0) {
      f.modes.col(k) = -f.modes.col(k);
      f.right.col(k) = -f.right.col(k);
    }
  }
  return f;
}

Eigen::VectorXd least_squares_pinv(const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& y) {
  require_finite(a, "least_squares_pinv");
  require_finite(y, "least_squares_pinv rhs");
  if (a.rows() == 0 || a.cols() == 0)
    fail(errc::empty_matrix, "least_squares_pinv: empty matrix");
  if (y.size() != a.rows())
    fail(errc::dimension_mismatch,
         "least_squares_pinv: rhs has " + std::to_string(y.size()) +
             " rows, matrix has " + std::to_string(a.rows()));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff =
      static_cast<double>(std::max(a.rows(), a.cols())) * kEps * s(0);
  Eigen::VectorXd coeff = svd.matrixU().transpose() * y;
  for (Index i = 0; i < s.size(); ++i)
    coeff(i) = s(i) > cutoff ? coeff(i) / s(i) : 0.0;
  return svd.matrixV() * coeff;
}

double condition_number(const Eigen::MatrixXd& a) {
  require_finite(a, "condition_number");
  if (a.rows() == 0 || a.cols() == 0)
    fail(errc::empty_matrix, "condition_number: empty matrix");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smax == 0.0)
    fail(errc::singular_matrix, "condition_number: all-zero matrix");
  if (smin < 1e-300 * smax) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace ssp
