#pragma once

#include "idl/lbfgs.hpp"
#include "idl/types.hpp"

#include <span>

namespace idl {

/// Penalized objective ||X - D C||_F^2 + gamma ||D^T D - I||_F^2.
///
/// `dict_raw` need not have unit columns; the penalty charges any deviation
/// from unit norm as well as pairwise coherence.
double idl_objective(const Matrix& dict_raw, const DataMatrix& data, const SparseCoding& coding, double gamma);

/// Gradient of idl_objective with respect to the dictionary:
/// 2 (D C C^T - X C^T) + 4 gamma (D D^T D - D).
Matrix idl_gradient(const Matrix& dict_raw, const DataMatrix& data, const SparseCoding& coding, double gamma);

struct RenormalizedDictionary {
  Dictionary dictionary;
  std::vector<Index> replaced;
};

/// Scales every column to unit norm. Columns with norm below 1e-12 are
/// replaced by normalized data columns, taken in decreasing order of
/// `residual_norms` (data column norms when empty), each used at most once.
RenormalizedDictionary renormalize_atoms(const Matrix& dict_raw, const DataMatrix& data,
                                         std::span<const double> residual_norms = {});

struct IdlUpdateResult {
  Dictionary dictionary;
  // Penalized objective at the input and at the optimizer output (before renormalization).
  double objective_before = 0.0;
  double objective_after = 0.0;
  int lbfgs_iterations = 0;
  bool line_search_failed = false;
  std::vector<double> objective_trace;
  std::vector<Index> replaced;
};

/// One IDL dictionary step: run L-BFGS on the penalized objective with the
/// coding held fixed, then rescale atoms to unit norm.
IdlUpdateResult idl_dictionary_update(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding,
                                      double gamma, const LbfgsParams& params);

} // namespace idl
