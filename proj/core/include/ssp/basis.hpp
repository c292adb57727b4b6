#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>

#include "ssp/matrixio.hpp"

namespace ssp {

enum class BasisSource { pod, vandermonde };

// A tailored basis for reconstruction: n x r modes, plus the singular value
// spectrum and training mean when the basis came from snapshot data.  POD
// modes are orthonormal; Vandermonde columns are not.
struct TailoredBasis {
  Eigen::MatrixXd modes;
  Eigen::VectorXd sigmas;               // empty for vandermonde
  std::optional<Eigen::VectorXd> mean;  // engaged iff training was centered
  BasisSource source = BasisSource::pod;

  Index n() const { return modes.rows(); }
  Index rank() const { return modes.cols(); }
};

// How to pick the POD truncation rank.
struct RankSpec {
  enum class Mode { fixed, energy, auto_threshold };
  Mode mode = Mode::fixed;
  Index r = 0;          // fixed
  double fraction = 0;  // energy: smallest r with cumsum(sigma) >= fraction

  static RankSpec fixed(Index r) { return {Mode::fixed, r, 0.0}; }
  static RankSpec energy(double fraction) {
    return {Mode::energy, 0, fraction};
  }
  static RankSpec auto_threshold() { return {Mode::auto_threshold, 0, 0.0}; }
};

struct HardThresholdResult {
  Index rank = 0;
  double omega = 0;    // omega(beta) polynomial value
  double tau = 0;      // omega * median(sigmas)
  bool floored = false;  // no singular value cleared tau; rank forced to 1
};

// Optimal hard threshold for singular values under white noise (Gavish &
// Donoho): beta = min(n_rows, n_cols) / max(n_rows, n_cols),
// omega(beta) = 0.56 beta^3 - 0.95 beta^2 + 1.82 beta + 1.43, keep sigmas
// above omega * median(sigma).  Requires the full spectrum, so callers must
// not feed it an already-truncated one.
HardThresholdResult hard_threshold_rank(const Eigen::VectorXd& sigmas,
                                        Index n_rows, Index n_cols);

// POD of a snapshot matrix: optional mean subtraction (on by default in the
// CLI), SVD of the centered data, then rank selection per `spec`.
TailoredBasis fit_pod(const SnapshotMatrix& snapshots, const RankSpec& spec,
                      bool mean_subtract);

// Exact projection coefficients a = modes^T (x - mean) for a POD basis.
Eigen::VectorXd project_coefficients(const TailoredBasis& basis,
                                     const Eigen::VectorXd& x);

// Columns 1, g, g^2, ..., g^(r-1) over a strictly increasing grid in [0, 1].
TailoredBasis vandermonde_basis(const Eigen::VectorXd& grid, Index r);

// Serialization: a basis is a directory holding modes.ssp (binary matrix)
// and basis.json (source, spectrum, mean).
void save_basis(const TailoredBasis& basis,
                const std::filesystem::path& dir);
TailoredBasis load_basis(const std::filesystem::path& dir);

}  // namespace ssp
