#include "idl/trainer.hpp"

#include "idl/coherence.hpp"
#include "idl/errors.hpp"
#include "idl/idl_update.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace idl {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Replaces unused atoms by the worst-coded observations, largest residual first.
Dictionary reseed_unused(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding,
                         const std::vector<double>& residuals, std::vector<Index>& reseeded) {
  const std::vector<Index> usage = coding.atom_usage();
  for (Index l = 0; l < dict.size(); ++l)
    if (usage[static_cast<std::size_t>(l)] == 0)
      reseeded.push_back(l);
  if (reseeded.empty())
    return dict;

  std::vector<Index> order(residuals.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return residuals[static_cast<std::size_t>(a)] > residuals[static_cast<std::size_t>(b)];
  });

  Matrix atoms = dict.atoms();
  auto next = order.begin();
  std::size_t done = 0;
  for (; done < reseeded.size(); ++done) {
    while (next != order.end() && data.column(*next).norm() < kZeroNorm)
      ++next;
    if (next == order.end())
      break;
    atoms.col(reseeded[done]) = data.column(*next) / data.column(*next).norm();
    ++next;
  }
  reseeded.resize(done);
  return Dictionary(std::move(atoms));
}

} // namespace

std::string method_name(const Method& method) {
  return std::visit(overloaded{
                        [](const IdlMethod&) { return std::string("idl"); },
                        [](const KsvdReplaceMethod&) { return std::string("ksvd"); },
                        [](const KsvdInksvdMethod&) { return std::string("inksvd"); },
                    },
                    method);
}

double method_parameter(const Method& method) {
  return std::visit(overloaded{
                        [](const IdlMethod& m) { return m.gamma; },
                        [](const KsvdReplaceMethod& m) { return m.mu_t; },
                        [](const KsvdInksvdMethod& m) { return m.mu_t; },
                    },
                    method);
}

void validate_method(const Method& method) {
  std::visit(overloaded{
                 [](const IdlMethod& m) {
                   if (!(m.gamma >= 0.0) || !std::isfinite(m.gamma))
                     throw ValidationError("gamma must be a finite nonnegative number");
                 },
                 [](const auto& m) {
                   if (!(m.mu_t > 0.0 && m.mu_t <= 1.0))
                     throw ValidationError("mu_t must lie in (0, 1]");
                 },
             },
             method);
}

bool same_outcome(const IterationRecord& a, const IterationRecord& b) {
  auto same_report = [](const std::optional<DecorrelationReport>& x, const std::optional<DecorrelationReport>& y) {
    if (x.has_value() != y.has_value())
      return false;
    return !x || (x->pair_updates == y->pair_updates && x->sweeps == y->sweeps && x->converged == y->converged &&
                  x->final_coherence == y->final_coherence);
  };
  return a.approx_error == b.approx_error && a.penalized_objective == b.penalized_objective &&
         a.mutual_coherence == b.mutual_coherence && a.singular_values == b.singular_values &&
         a.update_objective_before == b.update_objective_before &&
         a.update_objective_after == b.update_objective_after && a.reseeded_atoms == b.reseeded_atoms &&
         a.replaced_atoms == b.replaced_atoms && same_report(a.decorrelation, b.decorrelation);
}

Dictionary init_dictionary(const DataMatrix& data, Index size, std::uint64_t seed) {
  if (size < 1)
    throw ValidationError("dictionary size must be positive");
  std::vector<Index> pool;
  for (Index n = 0; n < data.n(); ++n)
    if (data.column(n).norm() > kZeroNorm)
      pool.push_back(n);
  if (pool.empty())
    throw ValidationError("cannot initialize a dictionary from all-zero data");

  std::mt19937_64 rng(seed);
  std::vector<Index> picks;
  picks.reserve(static_cast<std::size_t>(size));
  while (static_cast<Index>(picks.size()) < size) {
    // Partial Fisher-Yates over the pool; repeats once the pool is used up.
    const std::size_t want = std::min(pool.size(), static_cast<std::size_t>(size) - picks.size());
    for (std::size_t i = 0; i < want; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      picks.push_back(pool[i]);
    }
  }

  Matrix atoms(data.dim(), size);
  for (Index l = 0; l < size; ++l)
    atoms.col(l) = data.column(picks[static_cast<std::size_t>(l)]);
  return Dictionary(std::move(atoms));
}

TrainResult train(const DataMatrix& data, const Dictionary& initial, const TrainConfig& config, const Method& method) {
  if (initial.dim() != data.dim())
    throw ValidationError("initial dictionary dimension does not match data");
  config.validate(initial.dim(), initial.size());
  validate_method(method);

  const CoderSpec coder = coder_from_config(config);
  LbfgsParams lbfgs;
  lbfgs.memory = config.lbfgs_memory;
  lbfgs.max_iters = config.lbfgs_inner_iters;
  const double report_gamma = std::holds_alternative<IdlMethod>(method) ? std::get<IdlMethod>(method).gamma
                                                                         : config.gamma;

  Dictionary dict = initial;
  SparseCoding coding(initial.size(), data.n());
  TrainHistory history;
  history.reserve(static_cast<std::size_t>(config.iterations));

  for (int iter = 0; iter < config.iterations; ++iter) {
    const auto start = std::chrono::steady_clock::now();
    IterationRecord rec;

    BatchCoding batch = [&] {
      try {
        return batch_code(dict, data, coder);
      } catch (const ValidationError& e) {
        throw ValidationError("iteration " + std::to_string(iter) + ", " + e.what());
      } catch (const Error& e) {
        throw NumericError("iteration " + std::to_string(iter) + ", " + e.what());
      }
    }();
    coding = std::move(batch.coding);
    dict = reseed_unused(dict, data, coding, batch.residual_norms, rec.reseeded_atoms);

    std::visit(overloaded{
                   [&](const IdlMethod& m) {
                     IdlUpdateResult up = idl_dictionary_update(dict, data, coding, m.gamma, lbfgs);
                     rec.update_objective_before = up.objective_before;
                     rec.update_objective_after = up.objective_after;
                     dict = std::move(up.dictionary);
                   },
                   [&](const KsvdReplaceMethod& m) {
                     KsvdUpdateResult up = ksvd_atom_update(dict, data, coding);
                     coding = std::move(up.coding);
                     ReplaceResult rep = ksvd_replace(up.dictionary, data, coding, m.mu_t);
                     rec.replaced_atoms = std::move(rep.replaced);
                     dict = std::move(rep.dictionary);
                   },
                   [&](const KsvdInksvdMethod& m) {
                     KsvdUpdateResult up = ksvd_atom_update(dict, data, coding);
                     coding = std::move(up.coding);
                     DecorrelationResult dec = inksvd_decorrelate(up.dictionary, m.mu_t, m.max_pair_updates);
                     rec.decorrelation = dec.report;
                     dict = std::move(dec.dictionary);
                   },
               },
               method);

    const Matrix residual = data.columns() - dict.atoms() * coding.to_sparse();
    rec.approx_error = residual.squaredNorm();
    rec.penalized_objective = idl_objective(dict.atoms(), data, coding, report_gamma);
    rec.mutual_coherence = dict.size() >= 2 ? mutual_coherence(dict) : 0.0;
    rec.singular_values = singular_spectrum(dict);
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    history.push_back(std::move(rec));
  }

  return {std::move(dict), std::move(coding), std::move(history)};
}

TrainResult train(const DataMatrix& data, Index size, const TrainConfig& config, const Method& method) {
  return train(data, init_dictionary(data, size, config.seed), config, method);
}

} // namespace idl
