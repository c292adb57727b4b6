#include "ssp/matrixio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "ssp/version.hpp"

namespace ssp {

namespace {

using json = nlohmann::json;

// Explicit little-endian packing so files mean the same thing everywhere.
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i]))
         << (8 * i);
  return v;
}

void put_f64(std::string& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

double get_f64(const char* p) { return std::bit_cast<double>(get_u64(p)); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(errc::io_failure, "cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(errc::io_failure, "read error on " + path.string());
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    fail(errc::io_failure, "cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) fail(errc::io_failure, "write error on " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;  // to_chars cannot fail with this buffer size
  return std::string(buf, ptr);
}

SnapshotMatrix load_binary(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  if (raw.size() < 20 || raw.compare(0, 4, kMatrixMagic) != 0)
    fail(errc::malformed_header,
         path.string() + ": not an SSP1 matrix (bad magic)");
  const std::uint64_t rows = get_u64(raw.data() + 4);
  const std::uint64_t cols = get_u64(raw.data() + 12);
  if (rows == 0 || cols == 0)
    fail(errc::empty_matrix, path.string() + ": zero rows or columns");
  constexpr std::uint64_t kMaxElems = (1ULL << 40);  // 8 TiB guard
  if (rows > kMaxElems / cols)
    fail(errc::malformed_header, path.string() + ": implausible dimensions");
  const std::uint64_t need = 20 + rows * cols * 8;
  if (raw.size() != need)
    fail(errc::malformed_header,
         path.string() + ": payload is " + std::to_string(raw.size() - 20) +
             " bytes, header promises " + std::to_string(rows * cols * 8));
  SnapshotMatrix m;
  m.values.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  const char* p = raw.data() + 20;
  for (Index j = 0; j < m.values.cols(); ++j)
    for (Index i = 0; i < m.values.rows(); ++i, p += 8)
      m.values(i, j) = get_f64(p);
  return m;
}

void save_binary(const SnapshotMatrix& m, const std::filesystem::path& path) {
  std::string out;
  out.reserve(20 + static_cast<std::size_t>(m.rows()) *
                       static_cast<std::size_t>(m.cols()) * 8);
  out.append(kMatrixMagic);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) put_f64(out, m.values(i, j));
  write_file(path, out);
}

SnapshotMatrix load_csv(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0, line_no = 0;
  while (pos < raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    if (eol == std::string::npos) eol = raw.size();
    std::size_t end = eol;
    if (end > pos && raw[end - 1] == '\r') --end;  // tolerate CRLF
    ++line_no;
    if (end > pos) {
      std::vector<double> row;
      std::size_t field = pos;
      while (field <= end) {
        std::size_t comma = raw.find(',', field);
        if (comma == std::string::npos || comma > end) comma = end;
        double v;
        const char* first = raw.data() + field;
        const char* last = raw.data() + comma;
        while (first < last && (*first == ' ' || *first == '\t')) ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        while (ptr < last && (*ptr == ' ' || *ptr == '\t')) ++ptr;
        if (ec != std::errc() || ptr != last)
          fail(errc::malformed_header,
               path.string() + ":" + std::to_string(line_no) +
                   ": cannot parse '" + std::string(first, last) +
                   "' as a number");
        row.push_back(v);
        if (comma == end) break;
        field = comma + 1;
      }
      if (!rows.empty() && row.size() != rows.front().size())
        fail(errc::malformed_header,
             path.string() + ":" + std::to_string(line_no) + ": expected " +
                 std::to_string(rows.front().size()) + " fields, got " +
                 std::to_string(row.size()));
      rows.push_back(std::move(row));
    }
    pos = eol + 1;
  }
  if (rows.empty() || rows.front().empty())
    fail(errc::empty_matrix, path.string() + ": no data");
  SnapshotMatrix m;
  m.values.resize(static_cast<Index>(rows.size()),
                  static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m.values(i, j) = rows[static_cast<std::size_t>(i)]
                           [static_cast<std::size_t>(j)];
  return m;
}

void save_csv(const SnapshotMatrix& m, const std::filesystem::path& path) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out.push_back(',');
      out += format_double(m.values(i, j));
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

}  // namespace

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m,
                    const std::string& what) {
  if (m.allFinite()) return;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j)))
        fail(errc::non_finite_value,
             what + ": non-finite value at row " + std::to_string(i + 1) +
                 ", column " + std::to_string(j + 1));
  fail(errc::non_finite_value, what + ": non-finite value");
}

void SnapshotMatrix::validate() const {
  if (values.rows() == 0 || values.cols() == 0)
    fail(errc::empty_matrix, "snapshot matrix is empty");
  require_finite(values, "snapshot matrix");
  if (grid && grid->first * grid->second != values.rows())
    fail(errc::dimension_mismatch,
         "grid " + std::to_string(grid->first) + "x" +
             std::to_string(grid->second) + " does not match " +
             std::to_string(values.rows()) + " rows");
}

std::string to_string(PlacementMethod m) {
  switch (m) {
    case PlacementMethod::qr: return "qr";
    case PlacementMethod::qr_oversampled: return "qr_oversampled";
    case PlacementMethod::deim: return "deim";
    case PlacementMethod::random: return "random";
    case PlacementMethod::brute_force: return "brute_force";
  }
  return "?";
}

PlacementMethod placement_method_from_string(const std::string& s) {
  if (s == "qr") return PlacementMethod::qr;
  if (s == "qr_oversampled") return PlacementMethod::qr_oversampled;
  if (s == "deim") return PlacementMethod::deim;
  if (s == "random") return PlacementMethod::random;
  if (s == "brute_force") return PlacementMethod::brute_force;
  fail(errc::invalid_argument, "unknown placement method '" + s + "'");
}

void SensorSetRecord::validate() const {
  if (indices.empty()) fail(errc::empty_matrix, "sensor set is empty");
  if (n <= 0)
    fail(errc::invalid_argument, "sensor set has no state dimension");
  std::set<Index> seen;
  for (Index idx : indices) {
    if (idx < 1 || idx > n)
      fail(errc::index_out_of_range,
           "sensor index " + std::to_string(idx) + " outside [1, " +
               std::to_string(n) + "]");
    if (!seen.insert(idx).second)
      fail(errc::duplicate_index,
           "duplicate sensor index " + std::to_string(idx));
  }
}

SnapshotMatrix load_matrix(const std::filesystem::path& path,
                           MatrixFormat format) {
  SnapshotMatrix m = format == MatrixFormat::binary ? load_binary(path)
                                                    : load_csv(path);
  m.validate();
  return m;
}

void save_matrix(const SnapshotMatrix& matrix,
                 const std::filesystem::path& path, MatrixFormat format) {
  matrix.validate();
  if (format == MatrixFormat::binary)
    save_binary(matrix, path);
  else
    save_csv(matrix, path);
}

void save_sensors(const SensorSetRecord& record,
                  const std::filesystem::path& path) {
  record.validate();
  json doc;
  doc["format"] = kSensorsFormat;
  doc["indices"] = record.indices;
  doc["n"] = record.n;
  doc["method"] = to_string(record.method);
  doc["r"] = record.r;
  if (record.seed) doc["seed"] = *record.seed;
  write_file(path, doc.dump(2) + "\n");
}

SensorSetRecord load_sensors(const std::filesystem::path& path) {
  const std::string raw = read_file(path);
  json doc = json::parse(raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    fail(errc::malformed_header, path.string() + ": not a JSON object");
  if (doc.value("format", "") != kSensorsFormat)
    fail(errc::malformed_header,
         path.string() + ": missing or unknown sensor format tag");
  SensorSetRecord rec;
  try {
    rec.indices = doc.at("indices").get<std::vector<Index>>();
    rec.n = doc.at("n").get<Index>();
    rec.method = placement_method_from_string(doc.at("method").get<std::string>());
    rec.r = doc.value("r", Index{0});
    if (doc.contains("seed")) rec.seed = doc["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(errc::malformed_header, path.string() + ": " + e.what());
  }
  rec.validate();
  return rec;
}

}  // namespace ssp
