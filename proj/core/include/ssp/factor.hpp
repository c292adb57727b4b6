#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssp/matrixio.hpp"

namespace ssp {

// Result of a column-pivoted Householder QR stopped after k pivots.
// Pivot indices are 0-based column positions of the input matrix; higher
// layers that expose sensors to users convert to 1-based there.
struct PivotedQrFactor {
  std::vector<Index> pivots;  // selected columns, in selection order
  Eigen::VectorXd rdiag;      // |r_11|, ..., |r_kk|, non-increasing
  Eigen::MatrixXd q;          // n_rows x min(k, n_rows), orthonormal columns
  Eigen::MatrixXd r_upper;    // min(k, n_rows) x n_cols, columns pivot-first
  std::vector<Index> perm;    // full column permutation (pivots then rest)
};

// Greedy column-pivoted QR: at each step reflect on the remaining column of
// largest downdated 2-norm (ties -> lowest original column index) and stop
// after p pivots.  Column norms are downdated incrementally and recomputed
// from scratch whenever cancellation makes the running value untrustworthy.
PivotedQrFactor qr_pivot(const Eigen::MatrixXd& b, Index p);

// Rank-r truncated SVD.  Columns of `modes` are left singular vectors with a
// fixed sign convention: the entry of largest magnitude in each mode is
// nonnegative.  `right` gets the matching sign flips so modes * sigmas *
// right^T still reconstructs the input.
struct SvdFactor {
  Eigen::MatrixXd modes;    // n x r
  Eigen::VectorXd sigmas;   // r, non-increasing, >= 0
  Eigen::MatrixXd right;    // m x r
};

SvdFactor truncated_svd(const Eigen::MatrixXd& x, Index r);

// Minimum-norm least squares via SVD with cutoff max(rows, cols) * eps *
// sigma_max; singular values at or below the cutoff are treated as zero.
Eigen::VectorXd least_squares_pinv(const Eigen::MatrixXd& a,
                                   const Eigen::VectorXd& y);

// sigma_max / sigma_min; +inf when sigma_min < 1e-300 * sigma_max.
double condition_number(const Eigen::MatrixXd& a);

}  // namespace ssp
