#include "idl/sparse_coding.hpp"

#include "idl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace idl {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kVanishingResidual = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Matrix gather(const Matrix& atoms, const std::vector<Index>& idx) {
  Matrix sub(atoms.rows(), static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k)
    sub.col(static_cast<Index>(k)) = atoms.col(idx[k]);
  return sub;
}

// Least-squares coefficients of x on the columns of sub via the normal
// equations, followed by one step of iterative refinement. Empty when the
// Gram matrix is not numerically positive definite.
std::optional<Vector> least_squares(const Matrix& sub, const Eigen::Ref<const Vector>& x) {
  const Matrix gram = sub.transpose() * sub;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < 1.0 / kMaxCondition)
    return std::nullopt;
  Vector c = llt.solve(sub.transpose() * x);
  const Vector r = x - sub * c;
  c += llt.solve(sub.transpose() * r);
  return c;
}

SparseColumn to_column(const std::vector<Index>& idx, const Vector& coef) {
  SparseColumn col;
  col.reserve(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k)
    col.push_back({idx[k], coef(static_cast<Index>(k))});
  return col;
}

} // namespace

void validate_stop_rule(const StopRule& stop, Index dim, Index size) {
  std::visit(overloaded{
                 [&](const Cardinality& c) {
                   if (c.k < 1 || c.k > std::min(dim, size))
                     throw ValidationError("cardinality must lie in [1, min(D, L)]");
                 },
                 [](const ResidualNorm& r) {
                   if (!(r.eps > 0.0))
                     throw ValidationError("residual norm threshold must be positive");
                 },
                 [](const ResidualCoherence& r) {
                   if (!(r.mu_dl > 0.0 && r.mu_dl <= 1.0))
                     throw ValidationError("residual coherence threshold must lie in (0, 1]");
                 },
             },
             stop);
}

double residual_coherence(const Dictionary& dict, const Eigen::Ref<const Vector>& residual) {
  const double rn = residual.norm();
  if (rn == 0.0)
    return 0.0;
  return (dict.atoms().transpose() * residual).cwiseAbs().maxCoeff() / rn;
}

CodeResult omp(const Dictionary& dict, const Eigen::Ref<const Vector>& x, const StopRule& stop) {
  if (x.size() != dict.dim())
    throw ValidationError("observation length does not match dictionary dimension");
  if (!x.allFinite())
    throw ValidationError("observation contains non-finite entries");
  validate_stop_rule(stop, dict.dim(), dict.size());

  CodeResult result;
  const double xnorm = x.norm();
  result.residual_trace.push_back(xnorm);
  if (xnorm == 0.0)
    return result;

  const Matrix& atoms = dict.atoms();
  const Index max_atoms = std::min(dict.dim(), dict.size());
  std::vector<char> eligible(static_cast<std::size_t>(dict.size()), 1);
  std::vector<Index> selected;
  Vector coef;
  Vector r = x;

  while (true) {
    const double rn = r.norm();
    if (static_cast<Index>(selected.size()) >= max_atoms || rn < kVanishingResidual * xnorm)
      break;
    if (const auto* c = std::get_if<Cardinality>(&stop); c && static_cast<Index>(selected.size()) >= c->k)
      break;
    if (const auto* e = std::get_if<ResidualNorm>(&stop); e && rn <= e->eps)
      break;

    const Vector corr = atoms.transpose() * r;
    if (const auto* m = std::get_if<ResidualCoherence>(&stop); m && corr.cwiseAbs().maxCoeff() / rn < m->mu_dl)
      break;

    Index best = -1;
    double best_abs = 0.0;
    for (Index j = 0; j < dict.size(); ++j) {
      if (!eligible[static_cast<std::size_t>(j)])
        continue;
      const double a = std::abs(corr(j));
      if (best < 0 || a > best_abs) {
        best = j;
        best_abs = a;
      }
    }
    if (best < 0 || best_abs <= 1e-15 * rn)
      break;

    std::vector<Index> candidate = selected;
    candidate.push_back(best);
    eligible[static_cast<std::size_t>(best)] = 0;
    const Matrix sub = gather(atoms, candidate);
    auto fit = least_squares(sub, x);
    if (!fit)
      continue; // near-duplicate of a selected atom

    selected = std::move(candidate);
    coef = std::move(*fit);
    r = x - sub * coef;
    result.residual_trace.push_back(r.norm());
  }

  result.column = to_column(selected, coef);
  result.residual_norm = r.norm();
  return result;
}

CodeResult larc(const Dictionary& dict, const Eigen::Ref<const Vector>& x, double mu_dl) {
  if (x.size() != dict.dim())
    throw ValidationError("observation length does not match dictionary dimension");
  if (!x.allFinite())
    throw ValidationError("observation contains non-finite entries");
  if (!(mu_dl > 0.0 && mu_dl <= 1.0))
    throw ValidationError("residual coherence threshold must lie in (0, 1]");

  CodeResult result;
  const double xnorm = x.norm();
  result.residual_trace.push_back(xnorm);
  if (xnorm == 0.0)
    return result;

  const Matrix& atoms = dict.atoms();
  const Index max_atoms = std::min(dict.dim(), dict.size());
  std::vector<char> active_mask(static_cast<std::size_t>(dict.size()), 0);
  std::vector<Index> active;
  Vector beta; // LARS coefficients on the active set
  Vector r = x;
  Vector corr = atoms.transpose() * r;

  Index pending;
  corr.cwiseAbs().maxCoeff(&pending); // first maximum wins ties

  while (pending >= 0) {
    const double rn = r.norm();
    if (rn < kVanishingResidual * xnorm)
      break;
    if (corr.cwiseAbs().maxCoeff() / rn < mu_dl)
      break;

    active.push_back(pending);
    active_mask[static_cast<std::size_t>(pending)] = 1;
    beta.conservativeResize(static_cast<Index>(active.size()));
    beta(beta.size() - 1) = 0.0;

    const Matrix sub = gather(atoms, active);
    Vector signs(static_cast<Index>(active.size()));
    double common = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double c = corr(active[k]);
      signs(static_cast<Index>(k)) = c >= 0.0 ? 1.0 : -1.0;
      common = std::max(common, std::abs(c));
    }

    Eigen::LLT<Matrix> llt(sub.transpose() * sub);
    if (llt.info() != Eigen::Success || llt.rcond() < 1.0 / kMaxCondition) {
      active.pop_back();
      active_mask[static_cast<std::size_t>(pending)] = 0;
      beta.conservativeResize(static_cast<Index>(active.size()));
      break;
    }
    const Vector q = llt.solve(signs);
    const double equi = 1.0 / std::sqrt(signs.dot(q));
    const Vector w = equi * q;
    const Vector u = sub * w;
    const Vector a = atoms.transpose() * u;

    // Step to the next breakpoint, or all the way to the least-squares fit.
    double step = common / equi;
    Index next = -1;
    if (static_cast<Index>(active.size()) < max_atoms) {
      for (Index j = 0; j < dict.size(); ++j) {
        if (active_mask[static_cast<std::size_t>(j)])
          continue;
        const double cand[2][2] = {{common - corr(j), equi - a(j)}, {common + corr(j), equi + a(j)}};
        for (const auto& [num, den] : cand) {
          if (den <= 1e-12)
            continue;
          const double g = num / den;
          if (g > 1e-12 && g < step) {
            step = g;
            next = j;
          }
        }
      }
    }

    beta += step * w;
    r = x - sub * beta;
    corr = atoms.transpose() * r;
    result.residual_trace.push_back(r.norm());
    pending = next;
  }

  if (!active.empty()) {
    const Matrix sub = gather(atoms, active);
    if (auto fit = least_squares(sub, x)) {
      result.column = to_column(active, *fit);
      result.residual_norm = (x - sub * *fit).norm();
      return result;
    }
    result.column = to_column(active, beta);
    result.residual_norm = (x - sub * beta).norm();
    return result;
  }
  result.residual_norm = xnorm;
  return result;
}

CoderSpec coder_from_config(const TrainConfig& config) {
  if (config.coder == CoderKind::Omp)
    return OmpCoder{Cardinality{static_cast<Index>(config.coder_param)}};
  return LarcCoder{config.coder_param};
}

BatchCoding batch_code(const Dictionary& dict, const DataMatrix& data, const CoderSpec& coder) {
  if (data.dim() != dict.dim())
    throw ValidationError("data dimension " + std::to_string(data.dim()) + " does not match dictionary dimension " +
                          std::to_string(dict.dim()));
  BatchCoding out{SparseCoding(dict.size(), data.n()), std::vector<double>(static_cast<std::size_t>(data.n()))};
  for (Index n = 0; n < data.n(); ++n) {
    CodeResult res;
    try {
      res = std::visit(overloaded{
                           [&](const OmpCoder& c) { return omp(dict, data.column(n), c.stop); },
                           [&](const LarcCoder& c) { return larc(dict, data.column(n), c.mu_dl); },
                       },
                       coder);
    } catch (const ValidationError& e) {
      throw ValidationError("column " + std::to_string(n) + ": " + e.what());
    } catch (const Error& e) {
      throw NumericError("column " + std::to_string(n) + ": " + e.what());
    }
    out.coding.set_column(n, std::move(res.column));
    out.residual_norms[static_cast<std::size_t>(n)] = res.residual_norm;
  }
  return out;
}

} // namespace idl
