#pragma once

#include "idl/baselines.hpp"
#include "idl/trainer.hpp"
#include "idl/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace idl {

/// Per-iteration trace kept in reports.
struct TraceRow {
  double approx_error = 0.0;
  double penalized_objective = 0.0;
  double mutual_coherence = 0.0;

  bool operator==(const TraceRow&) const = default;
};

/// One trained dictionary of a parameter sweep.
struct GridResult {
  std::string method;
  double parameter = 0.0;
  GramSummary gram;
  std::vector<TraceRow> trace;
  // Decorrelation of the final iteration, and totals over all iterations (INK-SVD only).
  std::optional<DecorrelationReport> decorrelation;
  std::uint64_t total_pair_updates = 0;
  bool decorrelation_always_converged = true;
  double wall_time = 0.0;

  bool operator==(const GridResult&) const = default;
};

struct GeneralizationCurve {
  std::string method;
  double parameter = 0.0;
  // Median over test columns of ||x - D c|| / ||x||, one entry per cardinality.
  std::vector<double> median_residual;

  bool operator==(const GeneralizationCurve&) const = default;
};

struct ExperimentReport {
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> metadata;
  Index dim = 0;
  Index size = 0;
  double etf_flat = 0.0;
  bool include_timing = false;
  std::vector<GridResult> grid;
  std::vector<Index> cardinalities;
  std::vector<GeneralizationCurve> generalization;

  bool operator==(const ExperimentReport&) const = default;
};

struct LabeledDictionary {
  std::string method;
  double parameter = 0.0;
  Dictionary dictionary;
};

struct SpectrumRun {
  ExperimentReport report;
  std::vector<LabeledDictionary> dictionaries;
};

/// Trains one dictionary per grid point, all from init_dictionary(data, size,
/// base.seed), and records their frame statistics.
SpectrumRun run_spectrum_experiment(const DataMatrix& data, Index size, const TrainConfig& base,
                                    const std::vector<Method>& grid, int bins, bool include_timing = false);

/// Median normalized OMP residual of the test columns for every dictionary and
/// every cardinality. Test columns must be nonzero and must not repeat a
/// training column.
ExperimentReport run_generalization_experiment(const DataMatrix& train_data, const DataMatrix& test_data,
                                               const std::vector<LabeledDictionary>& dictionaries,
                                               const std::vector<Index>& cardinalities);

/// Normalized residual ||x - D c_K|| / ||x|| of each column for each K.
/// Row n of the result holds column n.
Matrix omp_residual_profile(const Dictionary& dict, const DataMatrix& data, const std::vector<Index>& cardinalities);

/// Settings of the spectrum and generalization experiments.
struct ExperimentConfig {
  // Data source: matrix files, a WAV file, or (default) the synthetic generator.
  std::string data_path;
  std::string test_data_path;
  std::string wav_path;

  Index dim = 16;
  Index size = 40;
  Index n_train = 2000;
  Index n_test = 400;
  Index sparsity = 3;
  double noise = 0.01;
  std::uint64_t seed = 1;

  TrainConfig train;
  std::vector<double> idl_gammas = {0.0, 1.0, 10.0, 50.0};
  std::vector<double> ksvd_mu_t = {1.0, 0.5};
  std::vector<double> inksvd_mu_t = {0.9, 0.5, 0.2};
  std::uint64_t max_pair_updates = 100'000;
  std::vector<Index> cardinalities = {1, 2, 4, 8, 16};
  int bins = 20;
  bool timing = false;

  std::vector<Method> grid() const;
};

/// Builds a config from key=value pairs; unknown keys are rejected.
ExperimentConfig experiment_config_from(const std::map<std::string, std::string>& values);

struct ExperimentData {
  DataMatrix train;
  DataMatrix test;
};

ExperimentData load_experiment_data(const ExperimentConfig& config);

/// Singular-spectrum sweep driven by a config; echoes `raw` into the report.
ExperimentReport spectrum_experiment(const ExperimentConfig& config, const std::map<std::string, std::string>& raw);

/// Spectrum sweep followed by held-out generalization curves.
ExperimentReport generalization_experiment(const ExperimentConfig& config,
                                           const std::map<std::string, std::string>& raw);

} // namespace idl
