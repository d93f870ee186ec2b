#include "idl/cli.hpp"

#include "idl/coherence.hpp"
#include "idl/config_file.hpp"
#include "idl/errors.hpp"
#include "idl/experiments.hpp"
#include "idl/matrix_io.hpp"
#include "idl/report.hpp"
#include "idl/synthetic.hpp"
#include "idl/trainer.hpp"
#include "idl/wav.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <string>

namespace idl {
namespace {

using nlohmann::json;

void emit(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty())
    out << j.dump(2) << '\n';
  else
    write_text_file(out_path, j.dump(2) + "\n");
}

struct IngestArgs {
  std::string wav;
  std::string csv;
  Index frame_len = 16;
  Index num_frames = 2000;
  std::uint64_t seed = 1;
  std::string out;
};

struct SynthArgs {
  Index dim = 16;
  Index size = 40;
  Index sparsity = 3;
  Index n = 2000;
  double noise = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string planted_out;
};

struct TrainArgs {
  std::string data;
  std::string method = "idl";
  Index size = 40;
  double gamma = 0.0;
  double mu_t = 1.0;
  std::uint64_t max_pair_updates = kDefaultMaxPairUpdates;
  int iters = 25;
  std::string coder = "larc";
  double coder_param = 0.2;
  int lbfgs_iters = 10;
  int lbfgs_memory = 7;
  std::uint64_t seed = 1;
  std::string out;
  std::string history;
  int bins = 20;
};

struct MetricsArgs {
  std::string dict;
  int bins = 20;
  std::string out;
};

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::string format = "json";
};

int do_ingest(const IngestArgs& a, std::ostream& out) {
  if (a.wav.empty() == a.csv.empty())
    throw ValidationError("ingest needs exactly one of --wav or --csv");
  DataMatrix frames = [&] {
    if (!a.wav.empty())
      return ingest_wav(a.wav, a.frame_len, a.num_frames, a.seed);
    // CSV input: samples in row-major reading order.
    const Matrix m = load_matrix(a.csv, MatrixFormat::Csv);
    const Matrix rows = m.transpose();
    std::vector<double> samples(rows.data(), rows.data() + rows.size());
    return frames_from_samples(samples, a.frame_len, a.num_frames, a.seed);
  }();
  save_matrix(frames.columns(), a.out);
  emit(json{{"out", a.out}, {"rows", frames.dim()}, {"cols", frames.n()}}, "", out);
  return kExitOk;
}

int do_synth(const SynthArgs& a, std::ostream& out) {
  const SyntheticData s = make_synthetic(a.dim, a.size, a.sparsity, a.n, a.noise, a.seed);
  save_matrix(s.data.columns(), a.out);
  if (!a.planted_out.empty())
    save_matrix(s.planted.atoms(), a.planted_out);
  json j{{"out", a.out}, {"rows", s.data.dim()}, {"cols", s.data.n()}, {"planted", a.planted_out}};
  if (s.planted.size() >= 2) {
    j["planted_mu"] = mutual_coherence(s.planted);
    j["welch"] = welch_bound(a.dim, a.size);
  }
  emit(j, "", out);
  return kExitOk;
}

int do_train(const TrainArgs& a, std::ostream& out) {
  const DataMatrix data(load_matrix(a.data));
  TrainConfig config;
  config.gamma = a.gamma;
  config.iterations = a.iters;
  if (a.coder == "larc")
    config.coder = CoderKind::Larc;
  else if (a.coder == "omp")
    config.coder = CoderKind::Omp;
  else
    throw ValidationError("--coder must be larc or omp");
  config.coder_param = a.coder_param;
  config.lbfgs_inner_iters = a.lbfgs_iters;
  config.lbfgs_memory = a.lbfgs_memory;
  config.seed = a.seed;

  Method method;
  if (a.method == "idl")
    method = IdlMethod{a.gamma};
  else if (a.method == "ksvd")
    method = KsvdReplaceMethod{a.mu_t};
  else if (a.method == "inksvd")
    method = KsvdInksvdMethod{a.mu_t, a.max_pair_updates};
  else
    throw ValidationError("--method must be idl, ksvd, or inksvd");

  const TrainResult result = train(data, a.size, config, method);
  if (!a.out.empty())
    save_matrix(result.dictionary.atoms(), a.out);
  if (!a.history.empty()) {
    const bool csv = std::filesystem::path(a.history).extension() == ".csv";
    write_text_file(a.history, csv ? history_to_csv(result.history) : history_to_json_lines(result.history));
  }

  const IterationRecord& last = result.history.back();
  json j{{"method", method_name(method)},
         {"parameter", method_parameter(method)},
         {"iterations", result.history.size()},
         {"approx_error", last.approx_error},
         {"penalized_objective", last.penalized_objective},
         {"out", a.out}};
  if (result.dictionary.size() >= 2)
    j["gram"] = to_json(gram_summary(result.dictionary, a.bins));
  emit(j, "", out);
  return kExitOk;
}

int do_metrics(const MetricsArgs& a, std::ostream& out) {
  const Dictionary dict(load_matrix(a.dict));
  emit(to_json(gram_summary(dict, a.bins)), a.out, out);
  return kExitOk;
}

int do_experiment(const ExperimentArgs& a, bool generalization, std::ostream& out) {
  const auto raw = read_key_value_file(a.config);
  const ExperimentConfig config = experiment_config_from(raw);
  const ExperimentReport report = generalization ? generalization_experiment(config, raw) : spectrum_experiment(config, raw);
  if (a.format == "csv") {
    if (a.out.empty())
      throw ValidationError("CSV export needs --out <directory>");
    export_report(report, a.out, ReportFormat::Csv);
  } else if (a.format == "json") {
    if (a.out.empty())
      out << to_json(report).dump(2) << '\n';
    else
      export_report(report, a.out, ReportFormat::Json);
  } else {
    throw ValidationError("--format must be json or csv");
  }
  return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dictionary learning with bounded self-coherence"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Cut random frames from audio into a data matrix");
  ingest_cmd->add_option("--wav", ingest.wav, "mono 16-bit PCM WAV file");
  ingest_cmd->add_option("--csv", ingest.csv, "CSV file of samples");
  ingest_cmd->add_option("--frame-len", ingest.frame_len, "samples per frame (D)");
  ingest_cmd->add_option("--num-frames", ingest.num_frames, "number of frames (N)");
  ingest_cmd->add_option("--seed", ingest.seed);
  ingest_cmd->add_option("--out", ingest.out, "output matrix (.csv or RAWF64)")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate data from a planted dictionary");
  synth_cmd->add_option("--dim", synth.dim);
  synth_cmd->add_option("--size", synth.size);
  synth_cmd->add_option("--sparsity", synth.sparsity);
  synth_cmd->add_option("--n", synth.n);
  synth_cmd->add_option("--noise", synth.noise);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out", synth.out, "output data matrix")->required();
  synth_cmd->add_option("--planted-out", synth.planted_out, "output planted dictionary");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Learn a dictionary");
  train_cmd->add_option("--data", tr.data, "training data matrix")->required();
  train_cmd->add_option("--method", tr.method, "idl | ksvd | inksvd");
  train_cmd->add_option("--size", tr.size, "number of atoms (L)");
  train_cmd->add_option("--gamma", tr.gamma, "coherence penalty weight for idl");
  train_cmd->add_option("--mu-t", tr.mu_t, "coherence threshold for ksvd / inksvd");
  train_cmd->add_option("--max-pair-updates", tr.max_pair_updates);
  train_cmd->add_option("--iters", tr.iters);
  train_cmd->add_option("--coder", tr.coder, "larc | omp");
  train_cmd->add_option("--coder-param", tr.coder_param, "mu_dl for larc, K for omp");
  train_cmd->add_option("--lbfgs-iters", tr.lbfgs_iters);
  train_cmd->add_option("--lbfgs-memory", tr.lbfgs_memory);
  train_cmd->add_option("--seed", tr.seed);
  train_cmd->add_option("--bins", tr.bins);
  train_cmd->add_option("--out", tr.out, "output dictionary matrix");
  train_cmd->add_option("--history", tr.history, "history file (.csv or JSON lines)");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Frame statistics of a dictionary");
  metrics_cmd->add_option("--dict", metrics.dict)->required();
  metrics_cmd->add_option("--bins", metrics.bins);
  metrics_cmd->add_option("--out", metrics.out);

  ExperimentArgs spectrum;
  auto* spectrum_cmd = app.add_subcommand("spectrum-exp", "Singular spectra across coherence settings");
  spectrum_cmd->add_option("--config", spectrum.config)->required();
  spectrum_cmd->add_option("--out", spectrum.out);
  spectrum_cmd->add_option("--format", spectrum.format, "json | csv");

  ExperimentArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-exp", "Held-out OMP residual curves");
  gen_cmd->add_option("--config", gen.config)->required();
  gen_cmd->add_option("--out", gen.out);
  gen_cmd->add_option("--format", gen.format, "json | csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*ingest_cmd)
      return do_ingest(ingest, out);
    if (*synth_cmd)
      return do_synth(synth, out);
    if (*train_cmd)
      return do_train(tr, out);
    if (*metrics_cmd)
      return do_metrics(metrics, out);
    if (*spectrum_cmd)
      return do_experiment(spectrum, false, out);
    if (*gen_cmd)
      return do_experiment(gen, true, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

} // namespace idl
