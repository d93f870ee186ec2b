#include "idl/lbfgs.hpp"

#include "idl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace idl {
namespace {

struct CurvaturePair {
  Vector s;
  Vector y;
  double rho;
};

Vector two_loop(const std::deque<CurvaturePair>& history, const Vector& grad) {
  Vector q = grad;
  std::vector<double> alpha(history.size());
  for (std::size_t i = history.size(); i-- > 0;) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  const auto& last = history.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double b = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - b) * history[i].s;
  }
  return -q;
}

} // namespace

void LbfgsParams::validate() const {
  if (memory < 1 || max_iters < 1 || max_backtracks < 1)
    throw ValidationError("L-BFGS memory, iterations, and backtracks must be positive");
  if (!(grad_tol > 0.0) || !(armijo > 0.0 && armijo < 1.0) || !(shrink > 0.0 && shrink < 1.0))
    throw ValidationError("L-BFGS tolerances out of range");
}

LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, Vector start, const LbfgsParams& params) {
  params.validate();
  if (!start.allFinite())
    throw ValidationError("L-BFGS start point is not finite");

  LbfgsResult out;
  Vector x = std::move(start);
  Vector g(x.size());
  double f = fn(x, g);
  if (!std::isfinite(f) || !g.allFinite())
    throw NumericError("objective is not finite at the start point");

  out.initial_value = f;
  out.initial_grad_norm = g.norm();
  out.trace.push_back(f);

  std::deque<CurvaturePair> history;
  Vector x_new(x.size());
  Vector g_new(x.size());

  for (int iter = 0; iter < params.max_iters; ++iter) {
    if (g.norm() < params.grad_tol)
      break;

    Vector dir = history.empty() ? Vector(-g) : two_loop(history, g);
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      history.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }

    // Without curvature information the first trial moves a unit distance.
    double step = history.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < params.max_backtracks; ++bt) {
      x_new = x + step * dir;
      f_new = fn(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + params.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= params.shrink;
    }
    if (!accepted) {
      out.line_search_failed = true;
      break;
    }
    if (!g_new.allFinite())
      throw NumericError("objective gradient is not finite");

    CurvaturePair pair{x_new - x, g_new - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-12 * pair.s.norm() * pair.y.norm()) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > params.memory)
        history.pop_front();
    }

    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    ++out.iterations;
    out.trace.push_back(f);
  }

  out.x = std::move(x);
  out.value = f;
  out.grad_norm = g.norm();
  return out;
}

} // namespace idl
