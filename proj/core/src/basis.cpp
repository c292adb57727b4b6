#include "ssp/basis.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "ssp/factor.hpp"
#include "ssp/version.hpp"

namespace ssp {

namespace {

using json = nlohmann::json;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Median of a descending spectrum.
double median_sorted_desc(const Eigen::VectorXd& s) {
  const Index n = s.size();
  return n % 2 ? s(n / 2) : 0.5 * (s(n / 2 - 1) + s(n / 2));
}

}  // namespace

HardThresholdResult hard_threshold_rank(const Eigen::VectorXd& sigmas,
                                        Index n_rows, Index n_cols) {
  if (n_rows < 1 || n_cols < 1)
    fail(errc::invalid_argument, "hard_threshold_rank: empty matrix shape");
  const Index full = std::min(n_rows, n_cols);
  if (sigmas.size() != full)
    fail(errc::invalid_argument,
         "hard_threshold_rank needs the full spectrum (" +
             std::to_string(full) + " values for a " +
             std::to_string(n_rows) + "x" + std::to_string(n_cols) +
             " matrix, got " + std::to_string(sigmas.size()) + ")");
  require_finite(sigmas, "hard_threshold_rank spectrum");
  for (Index i = 0; i < sigmas.size(); ++i) {
    if (sigmas(i) < 0.0)
      fail(errc::invalid_argument, "hard_threshold_rank: negative sigma");
    if (i > 0 && sigmas(i) > sigmas(i - 1))
      fail(errc::invalid_argument,
           "hard_threshold_rank: spectrum not non-increasing");
  }

  const double beta = static_cast<double>(std::min(n_rows, n_cols)) /
                      static_cast<double>(std::max(n_rows, n_cols));
  HardThresholdResult res;
  res.omega = 0.56 * beta * beta * beta - 0.95 * beta * beta + 1.82 * beta +
              1.43;
  res.tau = res.omega * median_sorted_desc(sigmas);

  Index rank = 0;
  while (rank < sigmas.size() && sigmas(rank) > res.tau) ++rank;
  if (rank == 0) {
    rank = 1;
    res.floored = true;
  }
  res.rank = rank;
  return res;
}

TailoredBasis fit_pod(const SnapshotMatrix& snapshots, const RankSpec& spec,
                      bool mean_subtract) {
  snapshots.validate();
  const Index n = snapshots.rows();
  const Index m = snapshots.cols();
  const Index rmax = std::min(n, m);
  const double max_abs = snapshots.values.cwiseAbs().maxCoeff();

  Eigen::MatrixXd centered = snapshots.values;
  std::optional<Eigen::VectorXd> mean;
  if (mean_subtract) {
    mean = snapshots.values.rowwise().mean();
    centered.colwise() -= *mean;
  }

  const SvdFactor full = truncated_svd(centered, rmax);

  // Degenerate data: nothing survives above roundoff of the raw values
  // (identical snapshots after centering, or an all-zero matrix).
  const double floor_tol =
      static_cast<double>(n) * static_cast<double>(m) * kEps * max_abs;
  if (full.sigmas(0) <= floor_tol)
    fail(errc::degenerate_after_centering,
         mean_subtract
             ? "fit_pod: snapshots are numerically identical after centering"
             : "fit_pod: snapshot matrix is numerically zero");

  Index r = 0;
  switch (spec.mode) {
    case RankSpec::Mode::fixed:
      if (spec.r < 1 || spec.r > rmax)
        fail(errc::infeasible_rank,
             "fit_pod: rank " + std::to_string(spec.r) + " outside [1, " +
                 std::to_string(rmax) + "]");
      if (full.sigmas(spec.r - 1) <= 0.0)
        fail(errc::infeasible_rank,
             "fit_pod: data rank is below requested rank " +
                 std::to_string(spec.r));
      r = spec.r;
      break;
    case RankSpec::Mode::energy: {
      if (!(spec.fraction > 0.0) || spec.fraction > 1.0)
        fail(errc::invalid_argument,
             "fit_pod: energy fraction must lie in (0, 1]");
      // Smallest r whose cumulative singular value sum reaches the target.
      double cum = 0.0;
      const double total = full.sigmas.sum();
      for (r = 1; r < rmax; ++r) {
        cum += full.sigmas(r - 1);
        if (cum >= spec.fraction * total) break;
      }
      break;
    }
    case RankSpec::Mode::auto_threshold:
      r = hard_threshold_rank(full.sigmas, n, m).rank;
      break;
  }

  TailoredBasis basis;
  basis.modes = full.modes.leftCols(r);
  basis.sigmas = full.sigmas.head(r);
  basis.mean = std::move(mean);
  basis.source = BasisSource::pod;
  return basis;
}

Eigen::VectorXd project_coefficients(const TailoredBasis& basis,
                                     const Eigen::VectorXd& x) {
  if (basis.source != BasisSource::pod)
    fail(errc::invalid_argument,
         "project_coefficients requires an orthonormal (pod) basis");
  if (x.size() != basis.n())
    fail(errc::dimension_mismatch,
         "project_coefficients: state has " + std::to_string(x.size()) +
             " rows, basis has " + std::to_string(basis.n()));
  require_finite(x, "project_coefficients state");
  if (basis.mean) return basis.modes.transpose() * (x - *basis.mean);
  return basis.modes.transpose() * x;
}

TailoredBasis vandermonde_basis(const Eigen::VectorXd& grid, Index r) {
  if (grid.size() == 0) fail(errc::empty_matrix, "vandermonde_basis: empty grid");
  require_finite(grid, "vandermonde_basis grid");
  if (r < 1 || r > grid.size())
    fail(errc::infeasible_rank,
         "vandermonde_basis: need 1 <= r <= " + std::to_string(grid.size()));
  if (grid(0) < 0.0 || grid(grid.size() - 1) > 1.0)
    fail(errc::invalid_argument, "vandermonde_basis: grid must lie in [0, 1]");
  for (Index i = 1; i < grid.size(); ++i)
    if (grid(i) <= grid(i - 1))
      fail(errc::invalid_argument,
           "vandermonde_basis: grid must be strictly increasing");

  TailoredBasis basis;
  basis.modes.resize(grid.size(), r);
  basis.modes.col(0).setOnes();
  for (Index k = 1; k < r; ++k)
    basis.modes.col(k) = basis.modes.col(k - 1).cwiseProduct(grid);
  basis.sigmas.resize(0);
  basis.source = BasisSource::vandermonde;
  return basis;
}

void save_basis(const TailoredBasis& basis, const std::filesystem::path& dir) {
  if (basis.modes.rows() == 0 || basis.modes.cols() == 0)
    fail(errc::empty_matrix, "save_basis: empty mode matrix");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(errc::io_failure, "cannot create " + dir.string());

  SnapshotMatrix modes;
  modes.values = basis.modes;
  save_matrix(modes, dir / "modes.ssp", MatrixFormat::binary);

  json doc;
  doc["format"] = kBasisFormat;
  doc["source"] =
      basis.source == BasisSource::pod ? "pod" : "vandermonde";
  doc["n"] = basis.n();
  doc["r"] = basis.rank();
  doc["sigmas"] = std::vector<double>(basis.sigmas.begin(), basis.sigmas.end());
  if (basis.mean)
    doc["mean"] = std::vector<double>(basis.mean->begin(), basis.mean->end());

  std::ofstream out(dir / "basis.json", std::ios::trunc);
  if (!out) fail(errc::io_failure, "cannot write " + (dir / "basis.json").string());
  out << doc.dump(2) << "\n";
  if (!out.flush()) fail(errc::io_failure, "write error on basis.json");
}

TailoredBasis load_basis(const std::filesystem::path& dir) {
  std::ifstream in(dir / "basis.json");
  if (!in)
    fail(errc::io_failure, "cannot open " + (dir / "basis.json").string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    fail(errc::malformed_header, (dir / "basis.json").string() + ": not JSON");
  if (doc.value("format", "") != kBasisFormat)
    fail(errc::malformed_header,
         (dir / "basis.json").string() + ": missing or unknown format tag");

  TailoredBasis basis;
  const std::string source = doc.value("source", "");
  if (source == "pod")
    basis.source = BasisSource::pod;
  else if (source == "vandermonde")
    basis.source = BasisSource::vandermonde;
  else
    fail(errc::malformed_header, "load_basis: unknown source '" + source + "'");

  basis.modes = load_matrix(dir / "modes.ssp", MatrixFormat::binary).values;

  try {
    const auto sig = doc.value("sigmas", std::vector<double>{});
    basis.sigmas = Eigen::Map<const Eigen::VectorXd>(
        sig.data(), static_cast<Index>(sig.size()));
    if (doc.contains("mean")) {
      const auto mu = doc["mean"].get<std::vector<double>>();
      basis.mean = Eigen::Map<const Eigen::VectorXd>(
          mu.data(), static_cast<Index>(mu.size()));
    }
  } catch (const json::exception& e) {
    fail(errc::malformed_header, "load_basis: " + std::string(e.what()));
  }

  if (doc.value("n", Index{-1}) != basis.n() ||
      doc.value("r", Index{-1}) != basis.rank())
    fail(errc::dimension_mismatch,
         "load_basis: basis.json shape disagrees with modes.ssp");
  if (basis.source == BasisSource::pod && basis.sigmas.size() != basis.rank())
    fail(errc::dimension_mismatch,
         "load_basis: pod basis needs one sigma per mode");
  if (basis.mean && basis.mean->size() != basis.n())
    fail(errc::dimension_mismatch, "load_basis: mean length mismatch");
  require_finite(basis.sigmas, "load_basis sigmas");
  if (basis.mean) require_finite(*basis.mean, "load_basis mean");
  return basis;
}

}  // namespace ssp
