#pragma once

#include "idl/baselines.hpp"
#include "idl/sparse_coding.hpp"
#include "idl/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace idl {

struct IdlMethod {
  double gamma = 0.0;
};
struct KsvdReplaceMethod {
  double mu_t = 1.0;
};
struct KsvdInksvdMethod {
  double mu_t = 1.0;
  std::uint64_t max_pair_updates = kDefaultMaxPairUpdates;
};
using Method = std::variant<IdlMethod, KsvdReplaceMethod, KsvdInksvdMethod>;

/// "idl", "ksvd", or "inksvd".
std::string method_name(const Method& method);
/// gamma for IDL, mu_t for the K-SVD variants.
double method_parameter(const Method& method);
void validate_method(const Method& method);

struct IterationRecord {
  double approx_error = 0.0;
  // Penalized objective of the normalized dictionary, with the IDL gamma
  // (TrainConfig::gamma for the K-SVD variants).
  double penalized_objective = 0.0;
  double mutual_coherence = 0.0;
  std::vector<double> singular_values;
  double wall_time = 0.0; // seconds spent in this iteration
  // IDL only: objective around the L-BFGS run, before renormalization.
  double update_objective_before = 0.0;
  double update_objective_after = 0.0;
  // Atoms left unused by the coding step and re-seeded from data.
  std::vector<Index> reseeded_atoms;
  std::optional<DecorrelationReport> decorrelation;
  std::vector<Index> replaced_atoms; // K-SVD coherence replacement
};

/// Equality of everything except wall_time.
bool same_outcome(const IterationRecord& a, const IterationRecord& b);

using TrainHistory = std::vector<IterationRecord>;

struct TrainResult {
  Dictionary dictionary;
  SparseCoding coding;
  TrainHistory history;
};

/// L atoms sampled uniformly from the nonzero data columns and normalized.
/// Sampling is without replacement while columns last, then with replacement.
Dictionary init_dictionary(const DataMatrix& data, Index size, std::uint64_t seed);

/// Alternating minimization from a given initial dictionary.
///
/// Every iteration codes all observations, re-seeds atoms that no observation
/// uses with the worst-approximated observations, runs the dictionary step
/// of `method`, and appends one history record.
TrainResult train(const DataMatrix& data, const Dictionary& initial, const TrainConfig& config, const Method& method);

/// Same, starting from init_dictionary(data, size, config.seed).
TrainResult train(const DataMatrix& data, Index size, const TrainConfig& config, const Method& method);

} // namespace idl
