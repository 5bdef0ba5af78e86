#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "premit/circuit.hpp"
#include "premit/mitigation.hpp"
#include "premit/noise.hpp"

namespace premit::experiment {

inline constexpr const char* kEngineVersion = "0.1.0";

/// Rejected configuration; field() names the offending key path.
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string field, const std::string& reason)
      : std::invalid_argument(field + ": " + reason), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

struct Observable {
  std::string label;  // Z, X, Y, R1, R2 or the Pauli word itself
  pauli::PauliString pauli;
};

/// One noise model: either calibrated from a target γ over the default
/// template, or explicit generator rates.
struct NoiseModelSpec {
  std::string label;
  std::optional<double> target_gamma;
  std::optional<std::uint64_t> seed;  // falls back to seeds.noise + position
  std::vector<noise::LindbladGenerator> rates;
};

enum class Estimator { Dca, Apc, Noisy, ExactOracle };
std::string to_string(Estimator e);

enum class Assignment { Parity, Position, Cyclic };

struct ExperimentConfig {
  std::size_t n = 10;
  std::size_t steps = 20;
  double h = 1.0;
  double J = 0.5236;
  double dt = 0.5;
  bool rz_on_target = true;
  std::vector<tensor::Index> chi_max{200};
  double tol = 0.0;
  std::vector<Observable> observables;
  std::vector<Estimator> estimators{Estimator::Dca, Estimator::Noisy};
  std::int64_t shots = 3000000;
  std::uint64_t noise_seed = 1;
  std::uint64_t sampling_seed = 7;
  std::vector<NoiseModelSpec> noise;
  Assignment assignment = Assignment::Parity;
  std::string output = "premit_out";
  /// Bond cap of the ideal reference and of the noisy state.
  tensor::Index reference_chi_max = 512;
  tensor::Index state_chi_max = 512;
  linalg::SvdOptions svd;
  std::size_t repetitions = 1;
  std::size_t workers = 1;
  bool diagnostics = true;
  double memory_cap_mb = 16384.0;
};

/// Parses and validates a configuration; missing keys take the benchmark
/// defaults. Relative noise-file paths resolve against base_dir.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical form with every default filled in.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Named observable (Z, X, Y, R1, R2) or an explicit Pauli word.
Observable resolve_observable(const std::string& name, std::size_t n);

circuit::TrotterCircuit build_circuit(const ExperimentConfig& cfg);
/// One NoiseLayer per model spec, calibrated where a target γ is given.
std::vector<noise::NoiseLayer> build_noise_models(const ExperimentConfig& cfg);
circuit::NoiseAssignment assign_noise(const ExperimentConfig& cfg, const circuit::TrotterCircuit& c,
                                      const std::vector<noise::NoiseLayer>& models);

/// Rough peak memory of the middle-out phase at the given bond cap.
double estimated_memory_mb(std::size_t n, tensor::Index chi);

// ---------------------------------------------------------------------------
// Results.

inline constexpr const char* kResultsHeader =
    "step,chi_max,estimator,ideal,noisy,mitigated,abs_error,gamma_analytic,gamma_empirical,pec_gamma_theory,shots,"
    "seed";

struct ResultRow {
  std::size_t step = 0;
  tensor::Index chi_max = 0;
  Estimator estimator = Estimator::Dca;
  double ideal = 0.0;
  double noisy = 0.0;
  double mitigated = 0.0;
  double abs_error = 0.0;
  std::optional<double> gamma_analytic;
  std::optional<double> gamma_empirical;
  double pec_gamma_theory = 1.0;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
};

struct DiagnosticsRow {
  std::size_t step = 0;
  tensor::Index chi_max = 0;
  std::string observable;
  mitigation::ColumnDiagnostics diag;
};

struct SummaryRow {
  std::string observable;
  tensor::Index chi_max = 0;
  Estimator estimator = Estimator::Dca;
  std::size_t steps = 0;
  double mean_abs_error = 0.0;
  double max_abs_error = 0.0;
  /// Slope of ln γ_analytic against ln γ_PEC over steps >= 1.
  std::optional<double> gamma_fit_exponent;
};

struct ObservableResults {
  Observable observable;
  std::vector<ResultRow> rows;
};

struct RunResult {
  std::vector<ObservableResults> results;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<SummaryRow> summary;
  nlohmann::json manifest;
};

struct RunOptions {
  bool resume = false;
  bool write_files = true;
};

/// Shortest round-trip decimal form; empty for absent values.
std::string format_number(double v);
std::string results_csv(const std::vector<ResultRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows);
std::vector<SummaryRow> summarize(const std::vector<ObservableResults>& results);

/// Circuit build, noise calibration, middle-out contraction with per-step
/// checkpoints, ideal and noisy evolution, per-step estimates and overheads.
/// Writes results[_<label>].csv, summary.csv, diagnostics.csv and
/// manifest.json into cfg.output.
RunResult run(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Checkpoint stem <output>/chi_<chi>/step_<step>.
std::filesystem::path checkpoint_stem(const std::filesystem::path& output, tensor::Index chi, std::size_t step);

// ---------------------------------------------------------------------------
// Other subcommands.

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Oracle suites: dense equivalence, channel inverse, unitality, calibration,
/// QCRB saturation and configuration rejection.
std::vector<CheckResult> validate(std::uint64_t seed = 1);
std::string checks_csv(const std::vector<CheckResult>& checks);

/// QCRB saturation residuals over seeded random instances at n in {1, 2}.
std::vector<CheckResult> qcrb_checks(std::uint64_t seed, std::size_t noiseless_instances = 200,
                                     std::size_t noisy_instances = 100);

/// Column diagnostics from the checkpoint of `step` (step 0 needs none).
/// Writes diagnose_<label>_chi<chi>_step<step>.json and, at n <= 4, the
/// off-diagonal values as CSV.
mitigation::ColumnDiagnostics diagnose(const ExperimentConfig& cfg, tensor::Index chi, std::size_t step,
                                       const Observable& obs, bool write_files = true);

/// Explicit (pauli, rate) lists for every noise model.
nlohmann::json noise_file(const ExperimentConfig& cfg);
/// Writes noise_file(cfg) to path and returns the text written.
std::string calibrate(const ExperimentConfig& cfg, const std::filesystem::path& path);

}  // namespace premit::experiment
