#include "idl/experiments.hpp"

#include "idl/coherence.hpp"
#include "idl/config_file.hpp"
#include "idl/errors.hpp"
#include "idl/matrix_io.hpp"
#include "idl/sparse_coding.hpp"
#include "idl/synthetic.hpp"
#include "idl/wav.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace idl {
namespace {

double median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1)
    return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

void check_cardinalities(const std::vector<Index>& cardinalities) {
  for (std::size_t i = 0; i < cardinalities.size(); ++i) {
    if (cardinalities[i] < 0)
      throw ValidationError("cardinalities must be nonnegative");
    if (i > 0 && cardinalities[i] <= cardinalities[i - 1])
      throw ValidationError("cardinalities must be strictly ascending");
  }
}

std::vector<Index> to_indices(const std::string& key, const std::vector<double>& values) {
  std::vector<Index> out;
  for (const double v : values) {
    if (v != std::floor(v))
      throw ValidationError(key + ": expected integers");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

} // namespace

SpectrumRun run_spectrum_experiment(const DataMatrix& data, Index size, const TrainConfig& base,
                                    const std::vector<Method>& grid, int bins, bool include_timing) {
  SpectrumRun run{};
  run.report.dim = data.dim();
  run.report.size = size;
  run.report.etf_flat = etf_flat_value(data.dim(), size);
  run.report.include_timing = include_timing;
  if (grid.empty())
    return run;

  const Dictionary initial = init_dictionary(data, size, base.seed);
  for (const Method& method : grid) {
    const auto start = std::chrono::steady_clock::now();
    TrainResult trained = [&] {
      try {
        return train(data, initial, base, method);
      } catch (const ValidationError& e) {
        throw ValidationError(method_name(method) + "(" + std::to_string(method_parameter(method)) + "): " + e.what());
      } catch (const Error& e) {
        throw NumericError(method_name(method) + "(" + std::to_string(method_parameter(method)) + "): " + e.what());
      }
    }();

    GridResult row;
    row.method = method_name(method);
    row.parameter = method_parameter(method);
    row.gram = gram_summary(trained.dictionary, bins);
    for (const IterationRecord& rec : trained.history) {
      row.trace.push_back({rec.approx_error, rec.penalized_objective, rec.mutual_coherence});
      if (rec.decorrelation) {
        row.total_pair_updates += rec.decorrelation->pair_updates;
        row.decorrelation_always_converged = row.decorrelation_always_converged && rec.decorrelation->converged;
        row.decorrelation = rec.decorrelation;
      }
    }
    if (include_timing)
      row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.report.grid.push_back(std::move(row));
    run.dictionaries.push_back({method_name(method), method_parameter(method), std::move(trained.dictionary)});
  }
  return run;
}

Matrix omp_residual_profile(const Dictionary& dict, const DataMatrix& data, const std::vector<Index>& cardinalities) {
  check_cardinalities(cardinalities);
  if (data.dim() != dict.dim())
    throw ValidationError("test data dimension does not match dictionary");
  const Index kmax = cardinalities.empty() ? 0 : std::min(cardinalities.back(), std::min(dict.dim(), dict.size()));

  Matrix profile(data.n(), static_cast<Index>(cardinalities.size()));
  for (Index n = 0; n < data.n(); ++n) {
    const double xnorm = data.column(n).norm();
    if (xnorm < kZeroNorm)
      throw ValidationError("test column " + std::to_string(n) + " is zero");
    // The greedy path for K atoms is a prefix of the path for kmax atoms.
    std::vector<double> trace{xnorm};
    if (kmax > 0)
      trace = omp(dict, data.column(n), Cardinality{kmax}).residual_trace;
    for (std::size_t i = 0; i < cardinalities.size(); ++i) {
      const auto at = std::min(static_cast<std::size_t>(cardinalities[i]), trace.size() - 1);
      profile(n, static_cast<Index>(i)) = trace[at] / xnorm;
    }
  }
  return profile;
}

ExperimentReport run_generalization_experiment(const DataMatrix& train_data, const DataMatrix& test_data,
                                               const std::vector<LabeledDictionary>& dictionaries,
                                               const std::vector<Index>& cardinalities) {
  check_cardinalities(cardinalities);
  if (train_data.dim() != test_data.dim())
    throw ValidationError("training and test data have different dimensions");
  std::set<std::vector<double>> seen;
  for (Index n = 0; n < train_data.n(); ++n)
    seen.emplace(train_data.column(n).begin(), train_data.column(n).end());
  for (Index n = 0; n < test_data.n(); ++n)
    if (seen.count(std::vector<double>(test_data.column(n).begin(), test_data.column(n).end())))
      throw ValidationError("test column " + std::to_string(n) + " also appears in the training data");

  ExperimentReport report;
  report.dim = test_data.dim();
  report.cardinalities = cardinalities;
  report.metadata["residual_normalization"] = "per test column, divided by its l2 norm";
  report.metadata["statistic"] = "median over test columns";
  for (const LabeledDictionary& entry : dictionaries) {
    report.size = entry.dictionary.size();
    report.etf_flat = etf_flat_value(entry.dictionary.dim(), entry.dictionary.size());
    const Matrix profile = omp_residual_profile(entry.dictionary, test_data, cardinalities);
    GeneralizationCurve curve{entry.method, entry.parameter, {}};
    for (Index k = 0; k < profile.cols(); ++k)
      curve.median_residual.push_back(median(std::vector<double>(profile.col(k).begin(), profile.col(k).end())));
    report.generalization.push_back(std::move(curve));
  }
  return report;
}

std::vector<Method> ExperimentConfig::grid() const {
  std::vector<Method> out;
  for (const double g : idl_gammas)
    out.push_back(IdlMethod{g});
  for (const double mu : ksvd_mu_t)
    out.push_back(KsvdReplaceMethod{mu});
  for (const double mu : inksvd_mu_t)
    out.push_back(KsvdInksvdMethod{mu, max_pair_updates});
  return out;
}

ExperimentConfig experiment_config_from(const std::map<std::string, std::string>& values) {
  ExperimentConfig c;
  for (const auto& [key, value] : values) {
    if (key == "data")
      c.data_path = value;
    else if (key == "test_data")
      c.test_data_path = value;
    else if (key == "wav")
      c.wav_path = value;
    else if (key == "dim")
      c.dim = parse_integer(key, value);
    else if (key == "size")
      c.size = parse_integer(key, value);
    else if (key == "n_train")
      c.n_train = parse_integer(key, value);
    else if (key == "n_test")
      c.n_test = parse_integer(key, value);
    else if (key == "sparsity")
      c.sparsity = parse_integer(key, value);
    else if (key == "noise")
      c.noise = parse_double(key, value);
    else if (key == "seed")
      c.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    else if (key == "iterations")
      c.train.iterations = static_cast<int>(parse_integer(key, value));
    else if (key == "coder") {
      if (value == "larc")
        c.train.coder = CoderKind::Larc;
      else if (value == "omp")
        c.train.coder = CoderKind::Omp;
      else
        throw ValidationError("coder must be larc or omp");
    } else if (key == "coder_param")
      c.train.coder_param = parse_double(key, value);
    else if (key == "lbfgs_iters")
      c.train.lbfgs_inner_iters = static_cast<int>(parse_integer(key, value));
    else if (key == "lbfgs_memory")
      c.train.lbfgs_memory = static_cast<int>(parse_integer(key, value));
    else if (key == "idl_gammas")
      c.idl_gammas = parse_double_list(key, value);
    else if (key == "ksvd_mu_t")
      c.ksvd_mu_t = parse_double_list(key, value);
    else if (key == "inksvd_mu_t")
      c.inksvd_mu_t = parse_double_list(key, value);
    else if (key == "max_pair_updates")
      c.max_pair_updates = static_cast<std::uint64_t>(parse_integer(key, value));
    else if (key == "cardinalities")
      c.cardinalities = to_indices(key, parse_double_list(key, value));
    else if (key == "bins")
      c.bins = static_cast<int>(parse_integer(key, value));
    else if (key == "timing")
      c.timing = value == "true" || value == "1";
    else
      throw ValidationError("unknown config key '" + key + "'");
  }
  if (c.dim < 1 || c.size < 2 || c.n_train < 1 || c.n_test < 1)
    throw ValidationError("dim, n_train, n_test must be positive and size at least 2");
  if (c.bins < 1)
    throw ValidationError("bins must be positive");
  c.train.seed = c.seed;
  check_cardinalities(c.cardinalities);
  for (const Method& m : c.grid())
    validate_method(m);
  return c;
}

ExperimentData load_experiment_data(const ExperimentConfig& config) {
  if (!config.data_path.empty()) {
    DataMatrix train(load_matrix(config.data_path));
    if (config.test_data_path.empty())
      throw ValidationError("a data file needs a matching test_data file");
    DataMatrix test(load_matrix(config.test_data_path));
    return {std::move(train), std::move(test)};
  }
  if (!config.wav_path.empty()) {
    const DataMatrix frames = ingest_wav(config.wav_path, config.dim, config.n_train + config.n_test, config.seed);
    auto [train, test] = split_columns(frames, config.n_train);
    return {std::move(train), std::move(test)};
  }
  const SyntheticData synth =
      make_synthetic(config.dim, config.size, config.sparsity, config.n_train + config.n_test, config.noise, config.seed);
  auto [train, test] = split_columns(synth.data, config.n_train);
  return {std::move(train), std::move(test)};
}

ExperimentReport spectrum_experiment(const ExperimentConfig& config, const std::map<std::string, std::string>& raw) {
  const ExperimentData data = load_experiment_data(config);
  ExperimentReport report =
      run_spectrum_experiment(data.train, config.size, config.train, config.grid(), config.bins, config.timing).report;
  report.config = raw;
  return report;
}

ExperimentReport generalization_experiment(const ExperimentConfig& config,
                                           const std::map<std::string, std::string>& raw) {
  const ExperimentData data = load_experiment_data(config);
  SpectrumRun run =
      run_spectrum_experiment(data.train, config.size, config.train, config.grid(), config.bins, config.timing);
  ExperimentReport gen = run_generalization_experiment(data.train, data.test, run.dictionaries, config.cardinalities);
  run.report.config = raw;
  run.report.metadata = std::move(gen.metadata);
  run.report.cardinalities = std::move(gen.cardinalities);
  run.report.generalization = std::move(gen.generalization);
  return run.report;
}

} // namespace idl
