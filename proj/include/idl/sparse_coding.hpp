#pragma once

#include "idl/types.hpp"

#include <variant>

namespace idl {

/// Stop after K atoms are selected.
struct Cardinality {
  Index k = 1;
};
/// Stop once the residual norm is at most eps.
struct ResidualNorm {
  double eps = 0.0;
};
/// Stop once max_j |<d_j, r>| / ||r|| drops below mu_dl.
struct ResidualCoherence {
  double mu_dl = 0.2;
};
using StopRule = std::variant<Cardinality, ResidualNorm, ResidualCoherence>;

void validate_stop_rule(const StopRule& stop, Index dim, Index size);

/// Outcome of coding one observation.
struct CodeResult {
  SparseColumn column;
  double residual_norm = 0.0;
  // Residual norm before the first selection and after every accepted step.
  std::vector<double> residual_trace;
};

/// max_j |<d_j, r>| / ||r||; zero for a zero residual.
double residual_coherence(const Dictionary& dict, const Eigen::Ref<const Vector>& residual);

/// Orthogonal matching pursuit.
///
/// Each step selects the atom most correlated with the residual (lowest index
/// on ties) and refits all selected coefficients by least squares. An atom
/// whose addition makes the selected Gram matrix singular (condition number
/// above 1e12) is marked ineligible and skipped. Besides `stop`, the loop ends
/// when the residual falls below 1e-12 ||x|| or min(D, L) atoms are selected.
CodeResult omp(const Dictionary& dict, const Eigen::Ref<const Vector>& x, const StopRule& stop);

/// Least-angle regression coder with a residual-coherence stopping rule.
///
/// Advances the LARS homotopy from breakpoint to breakpoint and stops at the
/// first breakpoint whose residual coherence is below mu_dl (or whose residual
/// vanishes). The returned coefficients are the least-squares refit on the
/// final active set. A singular active Gram matrix ends the path early.
CodeResult larc(const Dictionary& dict, const Eigen::Ref<const Vector>& x, double mu_dl);

struct OmpCoder {
  StopRule stop;
};
struct LarcCoder {
  double mu_dl = 0.2;
};
using CoderSpec = std::variant<OmpCoder, LarcCoder>;

CoderSpec coder_from_config(const TrainConfig& config);

struct BatchCoding {
  SparseCoding coding;
  std::vector<double> residual_norms;
};

/// Codes every column of `data` independently.
BatchCoding batch_code(const Dictionary& dict, const DataMatrix& data, const CoderSpec& coder);

} // namespace idl
