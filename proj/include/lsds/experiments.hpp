#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsds/adversary.hpp"
#include "lsds/detection.hpp"
#include "lsds/metrics.hpp"

namespace lsds {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { roc, sweep_nm, sweep_km, sweep_snr, single_point };

/// Method requested on the command line; auto_select resolves per kind
/// (closed form whenever the Theorem regime holds, Monte Carlo otherwise).
enum class RunMethod { auto_select, closed_form, monte_carlo, both };

ExperimentKind kind_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);
RunMethod method_from_string(const std::string& name);

/// One sweep grid point: `display` as written in the config (dB, element
/// count), `linear` after unit conversion. Conversion happens only at the
/// parse boundary.
struct SweepPoint {
  double display;
  double linear;
};

/// Explicit attacker placement that bypasses the road search; this is how
/// the reference scenarios pin (d_M, theta_M) directly.
struct AttackerOverrides {
  std::optional<double> d_m;
  std::optional<double> theta_m;
  std::optional<int> n_m;
  std::optional<double> k_m;  // linear
};

struct ExperimentConfig {
  ScenarioParams scenario;

  explicit ExperimentConfig(ScenarioParams base) : scenario(std::move(base)) {}

  AttackerOverrides overrides;
  std::optional<RoadGeometry> road;
  ExperimentKind kind = ExperimentKind::single_point;
  RunMethod method = RunMethod::auto_select;
  std::vector<SweepPoint> sweep;
  std::vector<SweepPoint> snr_list;      // roc: legitimate SNR grid
  std::vector<double> theta_m_list;      // roc: attacker bearings, radians
  long trials = 0;                       // 0 = kind-specific default
  std::uint64_t seed = 12345;
  unsigned workers = 1;
  int roc_points = 101;
  double ln_lambda = 0.0;
  std::string output_path;
  std::string source_path;
  std::string config_hash;
};

/// Parses the flat key = value config format. Keys carry explicit units
/// (`*_db`, `*_rad`, `*_m`); angle values accept either plain radians or a
/// "pi" suffix (`0.45pi`). Unknown keys, duplicates, and malformed values
/// raise ConfigError with file and line.
ExperimentConfig parse_experiment_config(const std::string& path, ExperimentKind kind);
ExperimentConfig parse_experiment_config_text(const std::string& text, ExperimentKind kind,
                                              const std::string& name = "<memory>");

struct ResultTable {
  std::vector<std::string> columns;       // numeric columns, in CSV order
  std::vector<std::vector<double>> rows;  // each row matches `columns`
  std::vector<std::string> method;        // per-row method tag, last CSV column
  nlohmann::json diagnostics;             // argmax info, single-run details
};

ResultTable run_roc(const ExperimentConfig& config);
ResultTable run_sweep_nm(const ExperimentConfig& config);
ResultTable run_sweep_km(const ExperimentConfig& config);
ResultTable run_sweep_snr(const ExperimentConfig& config);
ResultTable run_single(const ExperimentConfig& config);
ResultTable run_experiment(const ExperimentConfig& config);

void write_csv(const ResultTable& table, const std::string& path);

/// Sidecar JSON next to the CSV: seed, config hash, tool version, runtime,
/// and the table diagnostics. Written to `csv_path` + ".meta.json".
void write_metadata(const ResultTable& table, const ExperimentConfig& config,
                    double runtime_seconds, const std::string& csv_path);

std::string fnv1a64_hex(const std::string& bytes);

}  // namespace lsds
