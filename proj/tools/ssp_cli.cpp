#include "ssp_cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ssp/basis.hpp"
#include "ssp/csrecover.hpp"
#include "ssp/errors.hpp"
#include "ssp/matrixio.hpp"
#include "ssp/placement.hpp"
#include "ssp/reconstruct.hpp"
#include "ssp/rng.hpp"
#include "ssp/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ssp::cli {
namespace {

std::string timestamp_utc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

MatrixFormat format_for(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".ssp" || ext == ".bin") return MatrixFormat::binary;
  if (ext == ".csv") return MatrixFormat::csv;
  fail(errc::invalid_argument,
       "cannot infer matrix format from extension of " + path.string() +
           " (use .ssp, .bin or .csv)");
}

SnapshotMatrix load_any_matrix(const fs::path& path) {
  return load_matrix(path, format_for(path));
}

void write_text(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out.good())
    fail(errc::io_failure, "cannot write " + path.string());
}

void write_json_file(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(errc::malformed_header, path.string() + ": " + e.what());
  }
  return j;
}

// Every JSON artifact records how it was produced.
struct Provenance {
  std::vector<std::string> command_line;
  std::optional<std::uint64_t> seed;
  bool with_timestamp = true;

  json to_json() const {
    json p;
    p["command_line"] = command_line;
    p["seed"] = seed ? json(*seed) : json(nullptr);
    p["versions"] = {{"ssp", kVersion},
                     {"basis_format", kBasisFormat},
                     {"sensors_format", kSensorsFormat},
                     {"report_format", kReportFormat}};
    if (with_timestamp) p["timestamp"] = timestamp_utc();
    return p;
  }
};

// Re-opens a JSON artifact written by the core library and stamps the
// provenance block into it, keeping the document loadable as before.
void stamp_provenance(const fs::path& path, const Provenance& prov) {
  json doc = read_json_file(path);
  doc["provenance"] = prov.to_json();
  write_json_file(path, doc);
}

void emit_report(const std::string& out_path, const json& report,
                 std::ostream& out) {
  if (out_path.empty()) {
    out << report.dump(2) << "\n";
  } else {
    write_json_file(out_path, report);
    out << "wrote " << out_path << "\n";
  }
}

RankSpec parse_rank_spec(const std::string& s) {
  if (s == "auto") return RankSpec::auto_threshold();
  if (s.rfind("fixed:", 0) == 0) {
    const std::string v = s.substr(6);
    Index r = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), r);
    if (ec != std::errc() || p != v.data() + v.size() || r < 1)
      fail(errc::invalid_argument, "bad rank spec: " + s);
    return RankSpec::fixed(r);
  }
  if (s.rfind("energy:", 0) == 0) {
    const std::string v = s.substr(7);
    double f = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), f);
    if (ec != std::errc() || p != v.data() + v.size() || !(f > 0) || f > 1)
      fail(errc::invalid_argument, "bad rank spec: " + s);
    return RankSpec::energy(f);
  }
  fail(errc::invalid_argument,
       "bad rank spec: " + s + " (use fixed:N, energy:F or auto)");
}

SplitRule parse_split(const std::string& s) {
  SplitRule rule;
  if (s == "chrono") return rule;
  if (s.rfind("interleave:", 0) == 0) {
    const std::string v = s.substr(11);
    Index k = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
    if (ec != std::errc() || p != v.data() + v.size() || k < 2)
      fail(errc::invalid_argument, "bad split spec: " + s);
    rule.mode = SplitMode::interleave;
    rule.stride = k;
    return rule;
  }
  if (s.rfind("random:", 0) == 0) {
    const std::string v = s.substr(7);
    std::uint64_t seed = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
    if (ec != std::errc() || p != v.data() + v.size())
      fail(errc::invalid_argument, "bad split spec: " + s);
    rule.mode = SplitMode::seeded_random;
    rule.seed = seed;
    return rule;
  }
  fail(errc::invalid_argument,
       "bad split spec: " + s + " (use chrono, interleave:K or random:SEED)");
}

json split_to_json(const std::string& spec, const SplitRule& rule) {
  json j;
  j["spec"] = spec;
  switch (rule.mode) {
    case SplitMode::chronological:
      j["mode"] = "chrono";
      j["train_fraction"] = rule.train_fraction;
      break;
    case SplitMode::interleave:
      j["mode"] = "interleave";
      j["stride"] = rule.stride;
      break;
    case SplitMode::seeded_random:
      j["mode"] = "random";
      j["train_fraction"] = rule.train_fraction;
      j["seed"] = rule.seed;
      break;
  }
  return j;
}

SweepMethod parse_sweep_method(const std::string& s) {
  if (s == "qr") return SweepMethod::qr;
  if (s == "deim") return SweepMethod::deim;
  if (s == "random") return SweepMethod::random;
  if (s == "pod" || s == "pod_projection") return SweepMethod::pod_projection;
  fail(errc::invalid_argument,
       "unknown sweep method: " + s + " (use qr, deim, random or pod)");
}

OversampleRule parse_oversample(const std::string& s) {
  if (s == "r") return OversampleRule::p_equals_r;
  if (s == "2r") return OversampleRule::p_equals_2r;
  fail(errc::invalid_argument,
       "unknown oversample rule: " + s + " (use r or 2r)");
}

// "qr" or "qr:2r" — method with optional oversampling suffix.
MethodSpec parse_method_spec(const std::string& s) {
  MethodSpec spec;
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    spec.method = parse_sweep_method(s);
  } else {
    spec.method = parse_sweep_method(s.substr(0, colon));
    spec.oversample = parse_oversample(s.substr(colon + 1));
  }
  return spec;
}

json rank_rows_to_json(const std::vector<RankSweepRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    arr.push_back({{"r", row.r},
                   {"p", row.p},
                   {"mean_rel_error", row.mean_rel_error},
                   {"std_rel_error", row.std_rel_error},
                   {"mean_kappa", row.mean_kappa}});
  }
  return arr;
}

// ---- config-file defaults ------------------------------------------------
//
// --config names a JSON object whose keys are long flag names (without the
// dashes).  Keys already present on the command line are ignored; the rest
// are appended as --key=value tokens before parsing, so explicit flags
// always win.

std::vector<std::string> apply_config_defaults(
    const std::vector<std::string>& args) {
  fs::path config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  const json config = read_json_file(config_path);
  if (!config.is_object())
    fail(errc::invalid_argument,
         config_path.string() + ": config must be a JSON object");

  std::set<std::string> present;
  for (const auto& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    present.insert(a.substr(2, a.find('=') - 2));
  }

  std::vector<std::string> merged = args;
  for (const auto& [key, value] : config.items()) {
    if (key == "config" || present.count(key)) continue;
    // A false boolean turns a --key flag into its --no-key form.
    if (value.is_boolean()) {
      if (value.get<bool>())
        merged.push_back("--" + key);
      else if (!present.count("no-" + key))
        merged.push_back("--no-" + key);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!text.empty()) text += ",";
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      text = value.dump();
    }
    merged.push_back("--" + key + "=" + text);
  }
  return merged;
}

// ---- commands --------------------------------------------------------------

struct TrainArgs {
  std::string input, rank = "auto", out;
  bool mean_subtract = true;
};

void run_train(const TrainArgs& a, const Provenance& prov, std::ostream& out) {
  const SnapshotMatrix snaps = load_any_matrix(a.input);
  const RankSpec spec = parse_rank_spec(a.rank);
  const TailoredBasis basis = fit_pod(snaps, spec, a.mean_subtract);
  save_basis(basis, a.out);

  json doc = read_json_file(fs::path(a.out) / "basis.json");
  doc["provenance"] = prov.to_json();
  doc["train"] = {{"input", a.input},
                  {"rank_spec", a.rank},
                  {"mean_subtract", a.mean_subtract},
                  {"snapshots", snaps.cols()},
                  {"selected_r", basis.rank()}};
  write_json_file(fs::path(a.out) / "basis.json", doc);
  out << "wrote " << a.out << " (r = " << basis.rank() << ")\n";
}

struct PlaceArgs {
  std::string basis, method = "qr", criterion = "d", out;
  Index p = -1;
  std::uint64_t seed = 0;
};

void run_place(const PlaceArgs& a, const Provenance& prov, std::ostream& out) {
  const TailoredBasis basis = load_basis(a.basis);
  SensorSetRecord record;
  if (a.method == "qr") {
    record = select_qr_sensors(basis, a.p < 0 ? basis.rank() : a.p);
  } else if (a.method == "deim") {
    if (a.p >= 0 && a.p != basis.rank())
      fail(errc::invalid_argument,
           "deim places exactly r sensors; drop --p or pass p = r");
    record = select_deim_sensors(basis);
  } else if (a.method == "random") {
    if (a.p < 0) fail(errc::invalid_argument, "random placement needs --p");
    record = select_random_sensors(basis.n(), a.p, a.seed);
    record.r = basis.rank();
  } else if (a.method == "brute") {
    if (a.p < 0) fail(errc::invalid_argument, "brute placement needs --p");
    record = brute_force_optimal(basis, a.p, criterion_from_string(a.criterion));
  } else {
    fail(errc::invalid_argument,
         "unknown method: " + a.method + " (use qr, deim, random or brute)");
  }
  save_sensors(record, a.out);
  stamp_provenance(a.out, prov);
  out << "wrote " << a.out << " (p = " << record.p() << ")\n";
}

struct ReconstructArgs {
  std::string basis, sensors, measurements, truth, out;
  double eta = 0;
  std::uint64_t seed = 0;
};

void run_reconstruct(const ReconstructArgs& a, const Provenance& prov,
                     std::ostream& out) {
  const TailoredBasis basis = load_basis(a.basis);
  const SensorSetRecord sensors = load_sensors(a.sensors);
  const SnapshotMatrix meas = load_any_matrix(a.measurements);
  if (meas.rows() != sensors.p())
    fail(errc::dimension_mismatch,
         "measurements have " + std::to_string(meas.rows()) +
             " rows but the sensor set has p = " + std::to_string(sensors.p()));
  std::optional<SnapshotMatrix> truth;
  if (!a.truth.empty()) {
    truth = load_any_matrix(a.truth);
    if (truth->rows() != basis.n() || truth->cols() != meas.cols())
      fail(errc::dimension_mismatch, "truth shape does not match");
  }

  const Index m = meas.cols();
  SnapshotMatrix states;
  states.values.resize(basis.n(), m);
  Eigen::MatrixXd coeffs(basis.rank(), m);
  json errors = json::array();
  double kappa = 0;
  for (Index j = 0; j < m; ++j) {
    Eigen::VectorXd y = meas.values.col(j);
    if (a.eta > 0)
      y = add_measurement_noise(y, NoiseModel{a.eta, derive_seed(a.seed, j)});
    ReconstructionResult res =
        truth ? gappy_reconstruct(basis, sensors, y, truth->values.col(j))
              : gappy_reconstruct(basis, sensors, y);
    states.values.col(j) = res.state;
    coeffs.col(j) = res.coeffs;
    kappa = res.kappa;
    if (truth) errors.push_back(res.rel_error);
  }

  fs::create_directories(a.out);
  save_matrix(states, fs::path(a.out) / "reconstruction.ssp",
              MatrixFormat::binary);
  SnapshotMatrix coeff_mat;
  coeff_mat.values = coeffs;
  save_matrix(coeff_mat, fs::path(a.out) / "coefficients.ssp",
              MatrixFormat::binary);

  json report;
  report["format"] = kReportFormat;
  report["command"] = "reconstruct";
  report["kappa"] = kappa;
  report["eta"] = a.eta;
  report["snapshots"] = m;
  if (truth) {
    report["rel_errors"] = errors;
    double mean = 0;
    for (const auto& e : errors) mean += e.get<double>();
    report["mean_rel_error"] = mean / static_cast<double>(m);
  }
  report["provenance"] = prov.to_json();
  write_json_file(fs::path(a.out) / "report.json", report);
  out << "wrote " << a.out << "\n";
}

struct SweepRankArgs {
  std::string input, split = "chrono", method = "qr", oversample = "r", out,
              csv;
  std::vector<Index> ranks;
  bool mean_subtract = true;
  std::uint64_t seed = 0;
};

void run_sweep_rank(const SweepRankArgs& a, const Provenance& prov,
                    std::ostream& out) {
  const SnapshotMatrix snaps = load_any_matrix(a.input);
  const SplitRule rule = parse_split(a.split);
  const auto [train, test] = split_snapshots(snaps, rule);
  const SweepMethod method = parse_sweep_method(a.method);
  const OversampleRule oversample = parse_oversample(a.oversample);
  const std::vector<RankSweepRow> rows = sweep_rank(
      train, test, method, a.ranks, oversample, a.mean_subtract, a.seed);

  json report;
  report["format"] = kReportFormat;
  report["command"] = "sweep-rank";
  report["method"] = method_label(method, oversample);
  report["split"] = split_to_json(a.split, rule);
  report["train_snapshots"] = train.cols();
  report["test_snapshots"] = test.cols();
  report["mean_subtract"] = a.mean_subtract;
  report["rows"] = rank_rows_to_json(rows);
  report["provenance"] = prov.to_json();
  emit_report(a.out, report, out);
  if (!a.csv.empty()) {
    write_text(a.csv, rank_sweep_csv(rows));
    out << "wrote " << a.csv << "\n";
  }
}

struct SweepNoiseArgs {
  std::string input, split = "chrono", out, csv;
  std::vector<std::string> methods = {"qr"};
  std::vector<double> etas;
  Index rank = 0;
  bool mean_subtract = true;
  std::uint64_t seed = 0;
};

void run_sweep_noise(const SweepNoiseArgs& a, const Provenance& prov,
                     std::ostream& out) {
  const SnapshotMatrix snaps = load_any_matrix(a.input);
  const SplitRule rule = parse_split(a.split);
  const auto [train, test] = split_snapshots(snaps, rule);
  std::vector<MethodSpec> specs;
  for (const auto& token : a.methods) specs.push_back(parse_method_spec(token));
  const NoiseSweepReport result = sweep_noise(
      train, test, a.rank, specs, a.etas, a.mean_subtract, a.seed);

  json rows = json::array();
  for (const auto& row : result.rows) {
    rows.push_back({{"method", method_label(row.method, row.oversample)},
                    {"eta", row.eta},
                    {"mean_rel_error", row.mean_rel_error}});
  }
  json monotone = json::object();
  for (std::size_t i = 0; i < specs.size(); ++i)
    monotone[method_label(specs[i].method, specs[i].oversample)] =
        static_cast<bool>(result.nondecreasing[i]);

  json report;
  report["format"] = kReportFormat;
  report["command"] = "sweep-noise";
  report["rank"] = a.rank;
  report["split"] = split_to_json(a.split, rule);
  report["train_snapshots"] = train.cols();
  report["test_snapshots"] = test.cols();
  report["mean_subtract"] = a.mean_subtract;
  report["rows"] = rows;
  report["error_nondecreasing_in_eta"] = monotone;
  report["provenance"] = prov.to_json();
  emit_report(a.out, report, out);
  if (!a.csv.empty()) {
    write_text(a.csv, noise_sweep_csv(result.rows));
    out << "wrote " << a.csv << "\n";
  }
}

struct CsDemoArgs {
  Index n = 4096, p = 256;
  std::uint64_t seed = 0;
  bool equispaced = false;
  std::string out;
};

void run_cs_demo(const CsDemoArgs& a, const Provenance& prov,
                 std::ostream& out) {
  const ThreeToneReport rep = three_tone_demo(a.n, a.p, a.seed, a.equispaced);
  json report;
  report["format"] = kReportFormat;
  report["command"] = "cs-demo";
  report["n"] = rep.n;
  report["p"] = rep.p;
  report["equispaced"] = rep.equispaced;
  report["sample_indices"] = rep.sample_indices;  // 0-based grid positions
  report["true_hz"] = rep.true_hz;
  report["recovered_hz"] = rep.recovered_hz;
  report["match"] = rep.match;
  report["residual_norm"] = rep.residual_norm;
  report["sample_ratio"] = rep.sample_ratio;
  report["provenance"] = prov.to_json();
  emit_report(a.out, report, out);
}

struct FeketeArgs {
  Index degree = 30, grid = 1000;
  std::string out;
};

void run_fekete(const FeketeArgs& a, const Provenance& prov,
                std::ostream& out) {
  const FeketeReport rep = fekete_interpolation_demo(a.degree, a.grid);
  json report;
  report["format"] = kReportFormat;
  report["command"] = "fekete";
  report["degree"] = rep.degree;
  report["grid"] = rep.grid_n;
  report["qr_points"] = rep.qr_points;
  report["equispaced_points"] = rep.equispaced_points;
  report["qr_sup_error"] = rep.qr_sup_error;
  report["equispaced_sup_error"] = rep.equispaced_sup_error;
  report["error_ratio"] = rep.error_ratio;
  report["qr_kappa"] = rep.qr_kappa;
  report["equispaced_kappa"] = rep.equispaced_kappa;
  report["provenance"] = prov.to_json();
  emit_report(a.out, report, out);
}

struct EvalArgs {
  std::string basis, sensors, criterion = "d", out;
};

void run_eval(const EvalArgs& a, const Provenance& prov, std::ostream& out) {
  const TailoredBasis basis = load_basis(a.basis);
  const SensorSetRecord sensors = load_sensors(a.sensors);
  const PlacementCriterion crit = criterion_from_string(a.criterion);
  const double value = evaluate_criterion(basis, sensors, crit);
  json report;
  report["format"] = kReportFormat;
  report["command"] = "eval";
  report["criterion"] = to_string(crit);
  report["value"] = value;
  report["n"] = sensors.n;
  report["p"] = sensors.p();
  report["r"] = basis.rank();
  report["method"] = to_string(sensors.method);
  report["provenance"] = prov.to_json();
  emit_report(a.out, report, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  try {
    const std::vector<std::string> merged = apply_config_defaults(args);

    CLI::App app{"sparse sensor placement toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    bool no_timestamp = false;
    std::string config_path;
    app.add_flag("--no-timestamp", no_timestamp,
                 "omit the timestamp from outputs (golden-file testing)");
    app.add_option("--config", config_path,
                   "JSON file with default flag values");

    TrainArgs train_args;
    auto* train = app.add_subcommand(
        "train", "fit a POD basis from a snapshot matrix");
    train->add_option("--input", train_args.input, "snapshot matrix (.ssp/.csv)")
        ->required();
    train->add_option("--rank", train_args.rank,
                      "fixed:N, energy:F or auto (default auto)");
    train->add_flag("--mean-subtract,!--no-mean-subtract",
                    train_args.mean_subtract,
                    "center snapshots before the SVD (default on)");
    train->add_option("--out", train_args.out, "output basis directory")
        ->required();

    PlaceArgs place_args;
    auto* place = app.add_subcommand("place", "select sensor locations");
    place->add_option("--basis", place_args.basis, "basis directory")
        ->required();
    place->add_option("--p", place_args.p, "number of sensors");
    place->add_option("--method", place_args.method,
                      "qr, deim, random or brute (default qr)");
    place->add_option("--criterion", place_args.criterion,
                      "d, a, e or cond (brute force; default d)");
    place->add_option("--seed", place_args.seed, "seed for random placement");
    place->add_option("--out", place_args.out, "output sensors JSON")
        ->required();

    ReconstructArgs rec_args;
    auto* rec = app.add_subcommand(
        "reconstruct", "reconstruct full states from point measurements");
    rec->add_option("--basis", rec_args.basis, "basis directory")->required();
    rec->add_option("--sensors", rec_args.sensors, "sensors JSON")->required();
    rec->add_option("--measurements", rec_args.measurements,
                    "p x m matrix of sensor readings")
        ->required();
    rec->add_option("--truth", rec_args.truth,
                    "optional n x m ground truth for error reporting");
    rec->add_option("--eta", rec_args.eta,
                    "gaussian noise level added to the measurements");
    rec->add_option("--seed", rec_args.seed, "noise seed");
    rec->add_option("--out", rec_args.out, "output directory")->required();

    SweepRankArgs sr_args;
    auto* sr = app.add_subcommand(
        "sweep-rank", "reconstruction error as a function of basis rank");
    sr->add_option("--input", sr_args.input, "snapshot matrix")->required();
    sr->add_option("--split", sr_args.split,
                   "chrono, interleave:K or random:SEED (default chrono)");
    sr->add_option("--method", sr_args.method,
                   "qr, deim, random or pod (default qr)");
    sr->add_option("--ranks", sr_args.ranks, "comma-separated rank list")
        ->required()
        ->delimiter(',');
    sr->add_option("--oversample", sr_args.oversample,
                   "p rule: r or 2r (default r)");
    sr->add_flag("--mean-subtract,!--no-mean-subtract", sr_args.mean_subtract,
                 "center training data (default on)");
    sr->add_option("--seed", sr_args.seed, "seed for random placement");
    sr->add_option("--out", sr_args.out, "report JSON (stdout when omitted)");
    sr->add_option("--csv", sr_args.csv, "also write the table as CSV");

    SweepNoiseArgs sn_args;
    auto* sn = app.add_subcommand(
        "sweep-noise", "reconstruction error as a function of noise level");
    sn->add_option("--input", sn_args.input, "snapshot matrix")->required();
    sn->add_option("--split", sn_args.split,
                   "chrono, interleave:K or random:SEED (default chrono)");
    sn->add_option("--rank", sn_args.rank, "basis rank")->required();
    sn->add_option("--methods", sn_args.methods,
                   "comma-separated list, each qr|deim|random|pod with "
                   "optional :2r suffix (default qr)")
        ->delimiter(',');
    sn->add_option("--etas", sn_args.etas,
                   "comma-separated noise levels, strictly increasing")
        ->required()
        ->delimiter(',');
    sn->add_flag("--mean-subtract,!--no-mean-subtract", sn_args.mean_subtract,
                 "center training data (default on)");
    sn->add_option("--seed", sn_args.seed, "sweep seed");
    sn->add_option("--out", sn_args.out, "report JSON (stdout when omitted)");
    sn->add_option("--csv", sn_args.csv, "also write the table as CSV");

    CsDemoArgs cs_args;
    auto* cs = app.add_subcommand(
        "cs-demo", "three-tone compressed-sensing recovery demo");
    cs->add_option("--n", cs_args.n, "grid size (default 4096)");
    cs->add_option("--p", cs_args.p, "sample count (default 256)");
    cs->add_option("--seed", cs_args.seed, "sampling seed");
    cs->add_flag("--equispaced", cs_args.equispaced,
                 "sample uniformly at p Hz instead of randomly");
    cs->add_option("--out", cs_args.out, "report JSON (stdout when omitted)");

    FeketeArgs fk_args;
    auto* fk = app.add_subcommand(
        "fekete", "polynomial interpolation node comparison");
    fk->add_option("--degree", fk_args.degree, "polynomial degree (default 30)");
    fk->add_option("--grid", fk_args.grid, "grid size (default 1000)");
    fk->add_option("--out", fk_args.out, "report JSON (stdout when omitted)");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand(
        "eval", "evaluate a placement criterion for a sensor set");
    eval->add_option("--basis", eval_args.basis, "basis directory")->required();
    eval->add_option("--sensors", eval_args.sensors, "sensors JSON")
        ->required();
    eval->add_option("--criterion", eval_args.criterion,
                     "d, a, e or cond (default d)");
    eval->add_option("--out", eval_args.out,
                     "report JSON (stdout when omitted)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<const char*> argv;
    argv.push_back("ssp");
    for (const auto& a : merged) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::CallForVersion&) {
      out << app.version() << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }

    Provenance prov;
    prov.command_line.push_back("ssp");
    for (const auto& a : args) prov.command_line.push_back(a);
    prov.with_timestamp = !no_timestamp;

    if (train->parsed()) {
      run_train(train_args, prov, out);
    } else if (place->parsed()) {
      prov.seed = place_args.seed;
      run_place(place_args, prov, out);
    } else if (rec->parsed()) {
      prov.seed = rec_args.seed;
      run_reconstruct(rec_args, prov, out);
    } else if (sr->parsed()) {
      prov.seed = sr_args.seed;
      run_sweep_rank(sr_args, prov, out);
    } else if (sn->parsed()) {
      prov.seed = sn_args.seed;
      run_sweep_noise(sn_args, prov, out);
    } else if (cs->parsed()) {
      prov.seed = cs_args.seed;
      run_cs_demo(cs_args, prov, out);
    } else if (fk->parsed()) {
      run_fekete(fk_args, prov, out);
    } else if (eval->parsed()) {
      run_eval(eval_args, prov, out);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (classify(e.code())) {
      case error_class::validation:
        return 2;
      case error_class::io:
        return 1;
      case error_class::numerical:
        return 3;
    }
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ssp::cli
