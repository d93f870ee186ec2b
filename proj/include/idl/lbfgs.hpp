#pragma once

#include "idl/types.hpp"

#include <functional>

namespace idl {

struct LbfgsParams {
  int memory = 7;
  int max_iters = 10;
  double grad_tol = 1e-6;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 40;

  void validate() const;
};

/// Returns f(x) and writes the gradient into `grad` (already sized like x).
using ObjectiveFn = std::function<double(const Vector& x, Vector& grad)>;

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  double initial_value = 0.0;
  double initial_grad_norm = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  // Set when a line search exhausted its backtracks; x is the last accepted iterate.
  bool line_search_failed = false;
  // Objective at the start and after every accepted step.
  std::vector<double> trace;
};

/// Limited-memory BFGS with a backtracking Armijo line search.
///
/// Directions come from the two-loop recursion over the last `memory`
/// curvature pairs; pairs with y's <= 1e-12 ||s|| ||y|| are discarded. With no
/// stored pairs, or when the recursion fails to yield a descent direction,
/// the step falls back to steepest descent.
LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, Vector start, const LbfgsParams& params);

} // namespace idl
