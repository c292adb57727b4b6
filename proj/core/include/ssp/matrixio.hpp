#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssp/errors.hpp"

namespace ssp {

using Index = Eigen::Index;

// Snapshot data: one state vector per column, rows indexed by grid point /
// pixel / probe location.  `grid` optionally remembers a 2-D field shape
// (height, width) so tools can reshape on output; it never affects the math.
struct SnapshotMatrix {
  Eigen::MatrixXd values;
  std::optional<std::pair<Index, Index>> grid;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  // Throws on empty or non-finite data, or a grid that does not match rows().
  void validate() const;
};

enum class MatrixFormat { binary, csv };

enum class PlacementMethod { qr, qr_oversampled, deim, random, brute_force };

std::string to_string(PlacementMethod m);
PlacementMethod placement_method_from_string(const std::string& s);

// A chosen sensor set.  Indices are 1-based row numbers into the state
// vector, matching the on-disk JSON convention; `n` is the state dimension
// they index into and `r` the basis rank the selection targeted (0 when not
// applicable, e.g. plain random draws).
struct SensorSetRecord {
  std::vector<Index> indices;
  Index n = 0;
  PlacementMethod method = PlacementMethod::qr;
  Index r = 0;
  std::optional<std::uint64_t> seed;

  Index p() const { return static_cast<Index>(indices.size()); }

  // Throws unless indices are distinct, within [1, n], and nonempty.
  void validate() const;
};

// Matrix container files.
//
// binary: magic "SSP1", then rows and cols as little-endian uint64, then
//         rows*cols little-endian float64 values in column-major order.
// csv:    one matrix row per line, comma-separated, no header; values are
//         written with shortest round-trip formatting.
SnapshotMatrix load_matrix(const std::filesystem::path& path,
                           MatrixFormat format);
void save_matrix(const SnapshotMatrix& matrix,
                 const std::filesystem::path& path, MatrixFormat format);

// Sensor sets travel as small JSON documents (1-based indices).
void save_sensors(const SensorSetRecord& record,
                  const std::filesystem::path& path);
SensorSetRecord load_sensors(const std::filesystem::path& path);

// Shared helper: raise non_finite_value naming the first offending entry.
void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m,
                    const std::string& what);

}  // namespace ssp
