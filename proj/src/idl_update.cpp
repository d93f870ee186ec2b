#include "idl/idl_update.hpp"

#include "idl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace idl {
namespace {

void check_shapes(const Matrix& dict_raw, const DataMatrix& data, const SparseCoding& coding, double gamma) {
  if (dict_raw.rows() != data.dim() || dict_raw.cols() != coding.num_atoms() || coding.num_columns() != data.n())
    throw ValidationError("dictionary, data, and coding shapes disagree");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ValidationError("gamma must be a finite nonnegative number");
}

// Objective and gradient with the coding converted once.
class PenalizedProblem {
public:
  PenalizedProblem(const DataMatrix& data, const SparseCoding& coding, double gamma)
      : x_(data.columns()), c_(coding.to_sparse()), gamma_(gamma) {}

  double value(const Eigen::Ref<const Matrix>& d) const {
    const Matrix residual = x_ - d * c_;
    const Matrix penalty = d.transpose() * d - Matrix::Identity(d.cols(), d.cols());
    const double f = residual.squaredNorm() + gamma_ * penalty.squaredNorm();
    if (!std::isfinite(f))
      throw NumericError("penalized objective is not finite");
    return f;
  }

  double value_and_gradient(const Eigen::Ref<const Matrix>& d, Eigen::Ref<Matrix> grad) const {
    const Matrix residual = x_ - d * c_;
    const Matrix gram = d.transpose() * d;
    const Matrix penalty = gram - Matrix::Identity(d.cols(), d.cols());
    grad.noalias() = -2.0 * (residual * c_.transpose());
    grad.noalias() += 4.0 * gamma_ * (d * gram - d);
    return residual.squaredNorm() + gamma_ * penalty.squaredNorm();
  }

private:
  const Matrix& x_;
  SparseMatrix c_;
  double gamma_;
};

} // namespace

double idl_objective(const Matrix& dict_raw, const DataMatrix& data, const SparseCoding& coding, double gamma) {
  check_shapes(dict_raw, data, coding, gamma);
  return PenalizedProblem(data, coding, gamma).value(dict_raw);
}

Matrix idl_gradient(const Matrix& dict_raw, const DataMatrix& data, const SparseCoding& coding, double gamma) {
  check_shapes(dict_raw, data, coding, gamma);
  Matrix grad(dict_raw.rows(), dict_raw.cols());
  PenalizedProblem(data, coding, gamma).value_and_gradient(dict_raw, grad);
  if (!grad.allFinite())
    throw NumericError("penalized objective gradient is not finite");
  return grad;
}

RenormalizedDictionary renormalize_atoms(const Matrix& dict_raw, const DataMatrix& data,
                                         std::span<const double> residual_norms) {
  if (!dict_raw.allFinite())
    throw NumericError("dictionary contains non-finite entries");
  if (dict_raw.rows() != data.dim())
    throw ValidationError("dictionary and data dimensions disagree");
  if (!residual_norms.empty() && static_cast<Index>(residual_norms.size()) != data.n())
    throw ValidationError("one residual norm per data column required");

  Matrix atoms = dict_raw;
  std::vector<Index> degenerate;
  for (Index l = 0; l < atoms.cols(); ++l) {
    // Nonzero columns are scaled by the Dictionary constructor.
    if (atoms.col(l).norm() < kZeroNorm)
      degenerate.push_back(l);
  }

  if (!degenerate.empty()) {
    std::vector<double> score(static_cast<std::size_t>(data.n()));
    for (Index n = 0; n < data.n(); ++n)
      score[static_cast<std::size_t>(n)] =
          residual_norms.empty() ? data.column(n).norm() : residual_norms[static_cast<std::size_t>(n)];
    std::vector<Index> order(static_cast<std::size_t>(data.n()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
    });

    auto next = order.begin();
    for (const Index l : degenerate) {
      while (next != order.end() && data.column(*next).norm() < kZeroNorm)
        ++next;
      if (next == order.end())
        throw ValidationError("no nonzero data column left to replace a degenerate atom");
      atoms.col(l) = data.column(*next) / data.column(*next).norm();
      ++next;
    }
  }
  return {Dictionary(std::move(atoms)), std::move(degenerate)};
}

IdlUpdateResult idl_dictionary_update(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding,
                                      double gamma, const LbfgsParams& params) {
  check_shapes(dict.atoms(), data, coding, gamma);
  const Index rows = dict.dim();
  const Index cols = dict.size();
  const PenalizedProblem problem(data, coding, gamma);

  const ObjectiveFn fn = [&](const Vector& flat, Vector& grad) {
    const Eigen::Map<const Matrix> d(flat.data(), rows, cols);
    Eigen::Map<Matrix> g(grad.data(), rows, cols);
    return problem.value_and_gradient(d, g);
  };
  Vector start = Eigen::Map<const Vector>(dict.atoms().data(), dict.atoms().size());
  LbfgsResult opt = lbfgs_minimize(fn, std::move(start), params);

  const Eigen::Map<const Matrix> optimum(opt.x.data(), rows, cols);
  const Matrix residual = data.columns() - dict.atoms() * coding.to_sparse();
  std::vector<double> residual_norms(static_cast<std::size_t>(data.n()));
  for (Index n = 0; n < data.n(); ++n)
    residual_norms[static_cast<std::size_t>(n)] = residual.col(n).norm();
  RenormalizedDictionary renorm = renormalize_atoms(optimum, data, residual_norms);

  return IdlUpdateResult{std::move(renorm.dictionary),
                         opt.initial_value,
                         opt.value,
                         opt.iterations,
                         opt.line_search_failed,
                         std::move(opt.trace),
                         std::move(renorm.replaced)};
}

} // namespace idl
