#pragma once

#include <cstdint>
#include <vector>

#include "ssp/basis.hpp"
#include "ssp/matrixio.hpp"

namespace ssp {

// Sparse coefficient vector produced by a recovery routine.  Support holds
// 0-based coefficient indices in selection order; values align with it.
struct SparseSolution {
  std::vector<Index> support;
  Eigen::VectorXd values;
  double residual_norm = 0;
  std::vector<double> residual_history;  // ||r|| after each selection
  bool reduced_support = false;  // basic_solution dropped rank-deficient cols
};

// Known analytic sparsifying bases for signals on a regular 1-D grid.
struct UniversalBasisSpec {
  enum class Kind { dct };
  Kind kind = Kind::dct;
  Index n = 0;
};

// Orthonormal DCT-II analysis/synthesis pair:
//   s_k = alpha_k sum_t x_t cos(pi (2t+1) k / (2n)),
// alpha_0 = sqrt(1/n), alpha_k = sqrt(2/n) otherwise; synthesize inverts it.
Eigen::VectorXd dct_analyze(const Eigen::VectorXd& x);
Eigen::VectorXd dct_synthesize(const Eigen::VectorXd& s);

// Rows of the n x n DCT synthesis matrix at the given 0-based sample
// positions; this is Theta = C Psi for point samples in the DCT basis.
Eigen::MatrixXd dct_synthesis_rows(Index n, const std::vector<Index>& rows);

// Orthogonal matching pursuit: greedily add the column most correlated with
// the residual (normalized by column norm, ties -> lowest index), re-fit by
// least squares, stop when ||residual|| <= tol or k_max atoms are placed.
SparseSolution omp_recover(const Eigen::MatrixXd& theta,
                           const Eigen::VectorXd& y, Index k_max, double tol);

// Incoherence mu = sqrt(n) * max_{k,j} |<c_k, psi_j>| between point sensors
// and a basis with unit-norm columns; 1 <= mu <= sqrt(n).  The tailored
// overload normalizes mode columns first.
double incoherence(const SensorSetRecord& sensors,
                   const UniversalBasisSpec& basis);
double incoherence(const SensorSetRecord& sensors, const TailoredBasis& basis);
// Same quantity against the complex Fourier basis (maximally incoherent
// with point sensors: mu = 1).
double incoherence_fourier(const SensorSetRecord& sensors, Index n);

// Basic (pivot) solution of an underdetermined system: column-pivoted QR of
// Theta picks p columns, then a triangular solve gives the coefficients.
// The support depends on Theta alone, never on y.
SparseSolution basic_solution(const Eigen::MatrixXd& theta,
                              const Eigen::VectorXd& y);

// Three cosine tones at 37, 420 and 711 Hz on a one-second n-point grid,
// sampled at p random grid points (or uniformly at p Hz when `equispaced`;
// the seed then plays no role), recovered by OMP in the DCT basis. Uniform
// sampling aliases the two tones above p/2 Hz, so the equispaced control is
// expected to miss the true bins.
struct ThreeToneReport {
  Index n = 0;
  Index p = 0;
  std::uint64_t seed = 0;
  bool equispaced = false;
  std::vector<Index> sample_indices;  // 0-based grid positions, sorted
  std::vector<double> true_hz;
  std::vector<double> recovered_hz;   // top-3 atoms by magnitude, ascending
  bool match = false;                 // recovered_hz == true_hz exactly
  double residual_norm = 0;
  double sample_ratio = 0;            // p / (K log(n / K)), K = 3
};

ThreeToneReport three_tone_demo(Index n, Index p, std::uint64_t seed,
                                bool equispaced);

}  // namespace ssp
