// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "idl/baselines.hpp"
#include "idl/cli.hpp"
#include "idl/coherence.hpp"
#include "idl/experiments.hpp"
#include "idl/idl_update.hpp"
#include "idl/sparse_coding.hpp"
#include "idl/synthetic.hpp"
#include "idl/trainer.hpp"

#include "oracles.hpp"
#include "temp_dir.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

using namespace idl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += fmt(" [over time limit %.0f s]", limit_s);
  }
  if (!o.pass)
    ++failures;
  std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double stddev(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (const double x : v)
    ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

Dictionary spikes_and_hadamard(Index dim) {
  Matrix h(1, 1);
  h << 1.0;
  while (h.rows() < dim) {
    Matrix next(2 * h.rows(), 2 * h.cols());
    next << h, h, h, -h;
    h = next;
  }
  Matrix atoms(dim, 2 * dim);
  atoms << Matrix::Identity(dim, dim), h / std::sqrt(static_cast<double>(dim));
  return Dictionary(atoms);
}

// 1
Outcome gradient_correctness() {
  std::mt19937_64 rng(2024);
  const double gammas[] = {0.0, 0.1, 1.0, 10.0};
  std::uniform_int_distribution<Index> dims(2, 10);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Index dim = dims(rng);
    const Index size = std::uniform_int_distribution<Index>(dim, 3 * dim)(rng);
    const Index n = std::uniform_int_distribution<Index>(3, 12)(rng);
    const double gamma = gammas[i % 4];
    const Matrix d = testing::random_matrix(dim, size, rng);
    const SparseCoding c = testing::random_coding(size, n, std::min<Index>(size, 3), rng);
    const DataMatrix x(testing::random_matrix(dim, n, rng));
    const Matrix numeric = testing::central_difference(
        [&](const Matrix& m) { return testing::extended_objective(m, x.columns(), c.to_dense(), gamma); }, d, 1e-6);
    worst = std::max(worst, testing::max_gradient_error(idl_gradient(d, x, c, gamma), numeric));
  }
  return {worst <= 1e-5, fmt("50 instances, max elementwise relative error %.2e (limit 1e-5)", worst)};
}

// 2
Outcome objective_oracle() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Index dim = std::uniform_int_distribution<Index>(2, 12)(rng);
    const Index size = std::uniform_int_distribution<Index>(dim, 3 * dim)(rng);
    const Index n = std::uniform_int_distribution<Index>(1, 20)(rng);
    const double gamma = std::uniform_real_distribution<double>(0.0, 20.0)(rng);
    const Matrix d = testing::random_matrix(dim, size, rng);
    const SparseCoding c = testing::random_coding(size, n, std::min<Index>(size, 4), rng);
    const DataMatrix x(testing::random_matrix(dim, n, rng));
    const double direct = idl_objective(d, x, c, gamma);
    const double traced = testing::trace_form_objective(d, x.columns(), c.to_dense(), gamma);
    worst = std::max(worst, std::abs(direct - traced) / std::abs(traced));
  }
  return {worst <= 1e-10, fmt("100 instances, max relative disagreement %.2e (limit 1e-10)", worst)};
}

// 3
Outcome welch_saturation() {
  std::mt19937_64 rng(5);
  double worst_gap = 1e300;
  for (int i = 0; i < 1000; ++i) {
    const Index dim = std::uniform_int_distribution<Index>(2, 16)(rng);
    const Index size = std::uniform_int_distribution<Index>(2, 4 * dim)(rng);
    const Dictionary d = testing::random_dictionary(dim, size, rng);
    worst_gap = std::min(worst_gap, mutual_coherence(d) - welch_bound(dim, size));
  }
  const Dictionary mb(testing::mercedes_benz());
  const double mu = mutual_coherence(mb);
  const double bound = welch_bound(2, 3);
  const std::vector<double> sv = singular_spectrum(mb);
  double sv_err = 0.0;
  for (const double s : sv)
    sv_err = std::max(sv_err, std::abs(s - std::sqrt(1.5)));
  const bool pass = worst_gap >= -1e-12 && std::abs(mu - 0.5) <= 1e-9 && std::abs(bound - 0.5) <= 1e-9 &&
                    sv.size() == 2 && sv_err <= 1e-9;
  return {pass, fmt("min mu - welch over 1000 random = %.3e; Mercedes-Benz mu = %.12f, bound = %.12f, "
                    "max |sigma - sqrt(1.5)| = %.1e",
                    worst_gap, mu, bound, sv_err)};
}

// 4
Outcome etf_approach() {
  std::mt19937_64 rng(3);
  const DataMatrix data(1e-4 * testing::random_matrix(2, 20, rng));
  Matrix start(2, 3);
  start << 1.0, 0.9, 0.6, 0.0, 0.1, 0.8;
  TrainConfig config;
  config.iterations = 200;
  config.coder = CoderKind::Omp;
  config.coder_param = 2;
  const TrainResult r = train(data, Dictionary(start), config, IdlMethod{50.0});
  const double mu = mutual_coherence(r.dictionary);
  const std::vector<double> sv = singular_spectrum(r.dictionary);
  double sv_err = 0.0;
  for (const double s : sv)
    sv_err = std::max(sv_err, std::abs(s - std::sqrt(1.5)));
  return {std::abs(mu - 0.5) <= 0.02 && sv_err <= 0.02,
          fmt("D=2, L=3, gamma=50, 200 iterations: mu = %.6f (0.5 +- 0.02), sigma = [%.6f, %.6f] (sqrt 1.5 +- 0.02)",
              mu, sv[0], sv[1])};
}

ExperimentConfig desk_config() {
  ExperimentConfig c; // D=16, L=40, N=2000 train / 400 test, 25 iterations, LARC 0.2
  return c;
}

// 5
Outcome spectrum_flattening() {
  // Controlled run: OMP with K equal to the planted sparsity.
  ExperimentConfig c = desk_config();
  c.train.coder = CoderKind::Omp;
  c.train.coder_param = static_cast<double>(c.sparsity);
  const ExperimentData data = load_experiment_data(c);
  const SpectrumRun run = run_spectrum_experiment(data.train, c.size, c.train,
                                                  {IdlMethod{0.0}, IdlMethod{10.0}, IdlMethod{50.0}}, c.bins);
  std::vector<double> sd;
  for (const GridResult& g : run.report.grid)
    sd.push_back(stddev(g.gram.singular_values));
  const bool pass = sd.size() == 3 && sd[1] < sd[0] && sd[2] < sd[1];
  return {pass, fmt("OMP K=%ld, singular value std for gamma 0/10/50 = %.5f / %.5f / %.5f (strictly decreasing)",
                    static_cast<long>(c.sparsity), sd[0], sd[1], sd[2])};
}

// 6
Outcome erc_recovery() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  std::string detail;
  bool pass = true;
  for (const Index dim : {Index{16}, Index{64}}) {
    const Dictionary d = spikes_and_hadamard(dim);
    const double mu = mutual_coherence(d);
    const auto k = static_cast<Index>(erc_max_cardinality(mu));
    int ok = 0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Index> pool(static_cast<std::size_t>(d.size()));
      std::iota(pool.begin(), pool.end(), Index{0});
      std::shuffle(pool.begin(), pool.end(), rng);
      std::set<Index> truth(pool.begin(), pool.begin() + k);
      Vector x = Vector::Zero(dim);
      for (const Index a : truth) {
        double w = normal(rng);
        w += w >= 0 ? 0.1 : -0.1;
        x += w * d.atom(a);
      }
      std::set<Index> got;
      for (const auto& e : omp(d, x, Cardinality{k}).column)
        got.insert(e.atom);
      ok += got == truth ? 1 : 0;
    }
    pass = pass && ok == 100;
    detail += fmt("%sD=%ld L=%ld mu=%.4f k=%ld: %d/100", detail.empty() ? "" : "; ", static_cast<long>(dim),
                  static_cast<long>(d.size()), mu, static_cast<long>(k), ok);
  }
  return {pass, detail};
}

// 7
Outcome inksvd_contract_and_cost() {
  std::vector<double> ratios;
  bool contract = true;
  double worst_excess = -1.0;
  std::uint64_t min_tight = UINT64_MAX, max_loose = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const Dictionary d = testing::random_dictionary(16, 40, rng);
    const DecorrelationResult loose = inksvd_decorrelate(d, 0.5);
    const DecorrelationResult tight = inksvd_decorrelate(d, 0.1);
    for (const DecorrelationResult* r : {&loose, &tight}) {
      if (r->report.converged) {
        const double mu_t = r == &loose ? 0.5 : 0.1;
        const double excess = mutual_coherence(r->dictionary) - mu_t;
        worst_excess = std::max(worst_excess, excess);
        contract = contract && excess <= 1e-9;
      }
    }
    contract = contract && loose.report.converged;
    max_loose = std::max(max_loose, loose.report.pair_updates);
    min_tight = std::min(min_tight, tight.report.pair_updates);
    ratios.push_back(static_cast<double>(tight.report.pair_updates) /
                     static_cast<double>(std::max<std::uint64_t>(1, loose.report.pair_updates)));
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = 0.5 * (ratios[4] + ratios[5]);
  return {contract && median >= 10.0,
          fmt("converged runs: max mu - mu_t = %.2e (limit 1e-9); median update ratio 0.1 vs 0.5 = %.1f (>= 10), "
              "max updates at 0.5 = %llu, min at 0.1 = %llu",
              worst_excess, median, static_cast<unsigned long long>(max_loose),
              static_cast<unsigned long long>(min_tight))};
}

// 8
Outcome ksvd_replace_deficiency() {
  // Two duplicated pairs; the two highest-residual data columns are nearly parallel.
  Matrix atoms(3, 4);
  atoms << 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0;
  Matrix x(3, 3);
  x << 0, 0.01, 0.1, 0, 0, 0, 1, 1, 0;
  const ReplaceResult r = ksvd_replace(Dictionary(atoms), DataMatrix(x), SparseCoding(4, 3), 0.5);
  const double mu = mutual_coherence(r.dictionary);
  return {mu > 0.5, fmt("mu_t = 0.5, %zu atoms replaced, resulting mu = %.6f", r.replaced.size(), mu)};
}

// 9
Outcome generalization_curves() {
  ExperimentConfig c = desk_config();
  c.inksvd_mu_t = {1.0, 0.9, 0.5, 0.2};
  const ExperimentReport report = generalization_experiment(c, {});
  bool monotone = true;
  for (const GeneralizationCurve& curve : report.generalization)
    for (std::size_t i = 1; i < curve.median_residual.size(); ++i)
      monotone = monotone && curve.median_residual[i] <= curve.median_residual[i - 1];

  std::vector<const GeneralizationCurve*> free;
  for (const GeneralizationCurve& curve : report.generalization)
    if ((curve.method == "idl" && curve.parameter == 0.0) || (curve.method != "idl" && curve.parameter == 1.0))
      free.push_back(&curve);
  double worst = 0.0;
  for (std::size_t k = 0; k < report.cardinalities.size(); ++k) {
    double lo = 1e300, hi = 0.0;
    for (const GeneralizationCurve* curve : free) {
      lo = std::min(lo, curve->median_residual[k]);
      hi = std::max(hi, curve->median_residual[k]);
    }
    // Exact reconstructions (K = D) agree regardless of rounding noise.
    if (hi >= 1e-10)
      worst = std::max(worst, (hi - lo) / hi);
  }
  std::string curves;
  for (const GeneralizationCurve* curve : free) {
    curves += fmt(" %s(%g):", curve->method.c_str(), curve->parameter);
    for (const double m : curve->median_residual)
      curves += fmt(" %.4f", m);
  }
  return {monotone && free.size() == 3 && worst <= 0.10,
          fmt("%zu curves non-increasing: %s; uncontrolled max relative gap %.3f (limit 0.10);", report.generalization.size(),
              monotone ? "yes" : "no", worst) +
              curves};
}

// 10
Outcome determinism() {
  testing::TempDir dir;
  std::ofstream(dir / "exp.cfg") << "# desk-scale sweep\nseed = 7\n";
  const std::string cfg = (dir / "exp.cfg").string();
  std::string files[2];
  for (int i = 0; i < 2; ++i) {
    const std::string out = (dir / ("run" + std::to_string(i) + ".json")).string();
    const char* argv[] = {"idl", "spectrum-exp", "--config", cfg.c_str(), "--out", out.c_str()};
    std::ostringstream so, se;
    if (run_cli(6, argv, so, se) != kExitOk)
      return {false, "spectrum-exp failed: " + se.str()};
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[i] = ss.str();
  }
  return {!files[0].empty() && files[0] == files[1],
          fmt("two spectrum-exp runs, %zu and %zu bytes, %s", files[0].size(), files[1].size(),
              files[0] == files[1] ? "byte-identical" : "differ")};
}

} // namespace

int main() {
  criterion(1, "gradient matches central differences", 10, gradient_correctness);
  criterion(2, "objective matches trace-expansion oracle", 5, objective_oracle);
  criterion(3, "Welch bound and Mercedes-Benz frame", 10, welch_saturation);
  criterion(4, "IDL approaches the 2x3 ETF", 10, etf_approach);
  criterion(5, "spectrum flattens with gamma", 300, spectrum_flattening);
  criterion(6, "OMP exact recovery under the ERC", 30, erc_recovery);
  criterion(7, "INK-SVD contract and cost growth", 120, inksvd_contract_and_cost);
  criterion(8, "K-SVD replacement can exceed mu_t", 5, ksvd_replace_deficiency);
  criterion(9, "generalization curves", 300, generalization_curves);
  criterion(10, "spectrum-exp is byte-deterministic", 0, determinism);
  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
