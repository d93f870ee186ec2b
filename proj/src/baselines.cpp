#include "idl/baselines.hpp"

#include "idl/coherence.hpp"
#include "idl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace idl {
namespace {

constexpr int kPowerIterations = 50;
constexpr double kPowerTolerance = 1e-10;
// Slack above mu_t before a pair counts as violating the threshold.
constexpr double kThresholdSlack = 1e-10;

void check_shapes(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding) {
  if (dict.dim() != data.dim() || dict.size() != coding.num_atoms() || coding.num_columns() != data.n())
    throw ValidationError("dictionary, data, and coding shapes disagree");
}

void check_threshold(double mu_t) {
  if (!(mu_t > 0.0 && mu_t <= 1.0))
    throw ValidationError("coherence threshold must lie in (0, 1]");
}

std::vector<double> residual_norms(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding) {
  const Matrix r = data.columns() - dict.atoms() * coding.to_sparse();
  std::vector<double> norms(static_cast<std::size_t>(r.cols()));
  for (Index n = 0; n < r.cols(); ++n)
    norms[static_cast<std::size_t>(n)] = r.col(n).norm();
  return norms;
}

} // namespace

KsvdUpdateResult ksvd_atom_update(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding) {
  check_shapes(dict, data, coding);
  Matrix atoms = dict.atoms();
  std::vector<SparseColumn> columns;
  columns.reserve(static_cast<std::size_t>(coding.num_columns()));
  for (Index n = 0; n < coding.num_columns(); ++n)
    columns.push_back(coding.column(n));
  Matrix residual = data.columns() - atoms * coding.to_sparse();

  // (column, position within that column's entry list) for every use of an atom.
  std::vector<std::vector<std::pair<Index, std::size_t>>> uses(static_cast<std::size_t>(dict.size()));
  for (std::size_t n = 0; n < columns.size(); ++n)
    for (std::size_t k = 0; k < columns[n].size(); ++k)
      uses[static_cast<std::size_t>(columns[n][k].atom)].emplace_back(static_cast<Index>(n), k);

  for (Index l = 0; l < dict.size(); ++l) {
    const auto& support = uses[static_cast<std::size_t>(l)];
    if (support.empty())
      continue;
    const auto m = static_cast<Index>(support.size());

    Matrix restricted(dict.dim(), m);
    Vector row(m);
    for (Index i = 0; i < m; ++i) {
      const auto [n, k] = support[static_cast<std::size_t>(i)];
      row(i) = columns[static_cast<std::size_t>(n)][k].value;
      restricted.col(i) = residual.col(n) + atoms.col(l) * row(i);
    }
    double old_error = 0.0;
    for (Index i = 0; i < m; ++i)
      old_error += residual.col(support[static_cast<std::size_t>(i)].first).squaredNorm();

    // Power iteration seeded with the current coefficient row.
    Vector v = row.norm() > 0.0 ? Vector(row / row.norm()) : Vector(Vector::Ones(m) / std::sqrt(double(m)));
    Vector u = restricted * v;
    if (u.norm() < kZeroNorm)
      continue;
    u.normalize();
    for (int it = 0; it < kPowerIterations; ++it) {
      Vector v_next = restricted.transpose() * u;
      const double s = v_next.norm();
      if (s < kZeroNorm)
        break;
      v_next /= s;
      const double change = (v_next - v).norm();
      v = std::move(v_next);
      u = restricted * v;
      u.normalize();
      if (change < kPowerTolerance)
        break;
    }

    const Vector new_row = restricted.transpose() * u;
    const Matrix new_residual = restricted - u * new_row.transpose();
    if (new_residual.squaredNorm() > old_error)
      continue;

    atoms.col(l) = u;
    for (Index i = 0; i < m; ++i) {
      const auto [n, k] = support[static_cast<std::size_t>(i)];
      columns[static_cast<std::size_t>(n)][k].value = new_row(i);
      residual.col(n) = new_residual.col(i);
    }
  }

  return {Dictionary(std::move(atoms)), SparseCoding(coding.num_atoms(), std::move(columns))};
}

ReplaceResult ksvd_replace(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding, double mu_t) {
  check_shapes(dict, data, coding);
  check_threshold(mu_t);

  const std::vector<double> norms = residual_norms(dict, data, coding);
  std::vector<Index> order(norms.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return norms[static_cast<std::size_t>(a)] > norms[static_cast<std::size_t>(b)];
  });
  auto next = order.begin();

  ReplaceResult out{dict, {}, false};
  Matrix atoms = dict.atoms();
  for (Index d = 0; d < atoms.cols(); ++d) {
    for (Index e = d + 1; e < atoms.cols(); ++e) {
      if (std::min(std::abs(atoms.col(d).dot(atoms.col(e))), 1.0) <= mu_t)
        continue;
      while (next != order.end() && data.column(*next).norm() < kZeroNorm)
        ++next;
      if (next == order.end()) {
        out.exhausted = true;
        continue;
      }
      atoms.col(e) = data.column(*next) / data.column(*next).norm();
      out.replaced.push_back(e);
      ++next;
    }
  }
  out.dictionary = Dictionary(std::move(atoms));
  return out;
}

AtomPair inksvd_decorrelate_pair(const Vector& a, const Vector& b, double mu_t) {
  if (a.size() != b.size() || a.size() < 2)
    throw ValidationError("decorrelation needs two vectors of equal dimension >= 2");
  if (!(mu_t >= 0.0 && mu_t <= 1.0))
    throw ValidationError("coherence threshold must lie in [0, 1]");

  const double inner = a.dot(b);
  if (std::abs(inner) <= mu_t + kThresholdSlack)
    return {a, b};

  const double sign = inner >= 0.0 ? 1.0 : -1.0;
  const Vector aligned = sign * b;
  Vector bisector = a + aligned;
  Vector spread = a - aligned;
  bisector.normalize();

  if (spread.norm() < kZeroNorm) {
    // a = ±b: rotate in span{a, e_k}.
    const double peak = a.cwiseAbs().maxCoeff();
    Index k = 0;
    for (Index i = 0; i < a.size(); ++i) {
      if (std::abs(a(i)) < peak) {
        k = i;
        break;
      }
    }
    spread = -a(k) * a;
    spread(k) += 1.0;
  }
  spread -= spread.dot(bisector) * bisector;
  spread.normalize();

  const double half = 0.5 * std::acos(mu_t);
  AtomPair out;
  out.first = std::cos(half) * bisector + std::sin(half) * spread;
  out.second = sign * (std::cos(half) * bisector - std::sin(half) * spread);
  return out;
}

DecorrelationResult inksvd_decorrelate(const Dictionary& dict, double mu_t, std::uint64_t max_pair_updates) {
  check_threshold(mu_t);
  Matrix atoms = dict.atoms();
  DecorrelationReport report;

  bool budget_exhausted = false;
  while (!budget_exhausted) {
    ++report.sweeps;
    bool updated = false;
    for (Index d = 0; d < atoms.cols() && !budget_exhausted; ++d) {
      for (Index e = d + 1; e < atoms.cols(); ++e) {
        if (std::abs(atoms.col(d).dot(atoms.col(e))) <= mu_t + kThresholdSlack)
          continue;
        if (report.pair_updates >= max_pair_updates) {
          budget_exhausted = true;
          break;
        }
        AtomPair pair = inksvd_decorrelate_pair(atoms.col(d), atoms.col(e), mu_t);
        atoms.col(d) = pair.first;
        atoms.col(e) = pair.second;
        ++report.pair_updates;
        updated = true;
      }
    }
    if (!updated && !budget_exhausted) {
      report.converged = true;
      break;
    }
  }

  Dictionary result(std::move(atoms));
  report.final_coherence = result.size() >= 2 ? mutual_coherence(result) : 0.0;
  return {std::move(result), report};
}

} // namespace idl
