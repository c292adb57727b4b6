#pragma once

#include <cstdint>

#include "ssp/basis.hpp"
#include "ssp/matrixio.hpp"

namespace ssp {

// Optimality criteria for a sensor set gamma with measurement matrix
// Theta = C Psi (the selected rows of the basis), M = Theta^T Theta:
//   d_optimal:  log det M (-inf when singular), maximize
//   a_optimal:  trace M, maximize
//   e_optimal:  smallest eigenvalue of M, maximize
//   condition:  sigma_max(Theta) / sigma_min(Theta), minimize
enum class PlacementCriterion { d_optimal, a_optimal, e_optimal, condition };

std::string to_string(PlacementCriterion c);
PlacementCriterion criterion_from_string(const std::string& s);

// QR-pivot sensor placement.  p == rank: pivoted QR of modes^T.  p > rank:
// pivoted QR of modes * modes^T, which is refused above 20000 states because
// the Gram matrix is n x n (downsample the grid first).
SensorSetRecord select_qr_sensors(const TailoredBasis& basis, Index p);

// Discrete empirical interpolation: p = rank sensors, placing each at the
// largest-magnitude entry of the current interpolation residual.
SensorSetRecord select_deim_sensors(const TailoredBasis& basis);

// Uniform draw of p distinct rows out of n (seeded, reproducible).
SensorSetRecord select_random_sensors(Index n, Index p, std::uint64_t seed);

// Exhaustive search over all C(n, p) subsets; refused above 1e6 candidates.
// Ties keep the lexicographically smallest index set.
SensorSetRecord brute_force_optimal(const TailoredBasis& basis, Index p,
                                    PlacementCriterion criterion);

double evaluate_criterion(const TailoredBasis& basis,
                          const SensorSetRecord& sensors,
                          PlacementCriterion criterion);

// Theta = rows `sensors` of the mode matrix (p x r).
Eigen::MatrixXd sensor_rows(const TailoredBasis& basis,
                            const SensorSetRecord& sensors);

}  // namespace ssp
