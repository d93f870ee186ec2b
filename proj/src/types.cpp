#include "idl/types.hpp"

#include "idl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace idl {

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
  if (atoms_.rows() < 1 || atoms_.cols() < 1)
    throw ValidationError("dictionary must have at least one row and one atom");
  if (!atoms_.allFinite())
    throw ValidationError("dictionary contains non-finite entries");
  for (Index l = 0; l < atoms_.cols(); ++l) {
    const double norm = atoms_.col(l).norm();
    if (norm < kZeroNorm)
      throw ValidationError("dictionary atom " + std::to_string(l) + " has zero norm");
    if (std::abs(norm - 1.0) > 1e-15) // already unit columns stay bit-identical
      atoms_.col(l) /= norm;
  }
}

DataMatrix::DataMatrix(Matrix columns) : columns_(std::move(columns)) {
  if (columns_.rows() < 1 || columns_.cols() < 1)
    throw ValidationError("data matrix must have at least one row and one column");
  if (!columns_.allFinite())
    throw ValidationError("data matrix contains non-finite entries");
}

SparseCoding::SparseCoding(Index num_atoms, Index num_columns)
    : num_atoms_(num_atoms), columns_(static_cast<std::size_t>(num_columns)) {
  if (num_atoms < 1 || num_columns < 0)
    throw ValidationError("invalid coding shape");
}

SparseCoding::SparseCoding(Index num_atoms, std::vector<SparseColumn> columns)
    : num_atoms_(num_atoms), columns_(std::move(columns)) {
  if (num_atoms < 1)
    throw ValidationError("invalid coding shape");
  for (const auto& c : columns_)
    check_column(c);
}

void SparseCoding::check_column(const SparseColumn& column) const {
  std::vector<Index> seen;
  seen.reserve(column.size());
  for (const auto& e : column) {
    if (e.atom < 0 || e.atom >= num_atoms_)
      throw ValidationError("coding atom index " + std::to_string(e.atom) + " out of range");
    if (!std::isfinite(e.value))
      throw ValidationError("coding coefficient is not finite");
    seen.push_back(e.atom);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw ValidationError("coding column selects an atom twice");
}

void SparseCoding::set_column(Index n, SparseColumn column) {
  check_column(column);
  columns_.at(static_cast<std::size_t>(n)) = std::move(column);
}

std::vector<Index> SparseCoding::atom_usage() const {
  std::vector<Index> usage(static_cast<std::size_t>(num_atoms_), 0);
  for (const auto& c : columns_)
    for (const auto& e : c)
      ++usage[static_cast<std::size_t>(e.atom)];
  return usage;
}

SparseMatrix SparseCoding::to_sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t n = 0; n < columns_.size(); ++n)
    for (const auto& e : columns_[n])
      triplets.emplace_back(e.atom, static_cast<Index>(n), e.value);
  SparseMatrix m(num_atoms_, num_columns());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Matrix SparseCoding::to_dense() const {
  Matrix m = Matrix::Zero(num_atoms_, num_columns());
  for (std::size_t n = 0; n < columns_.size(); ++n)
    for (const auto& e : columns_[n])
      m(e.atom, static_cast<Index>(n)) = e.value;
  return m;
}

void TrainConfig::validate(Index dim, Index size) const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ValidationError("gamma must be a finite nonnegative number");
  if (iterations < 1)
    throw ValidationError("iterations must be positive");
  if (lbfgs_inner_iters < 1 || lbfgs_memory < 1)
    throw ValidationError("L-BFGS iteration count and memory must be positive");
  if (coder == CoderKind::Larc) {
    if (!(coder_param > 0.0 && coder_param <= 1.0))
      throw ValidationError("LARC residual coherence threshold must lie in (0, 1]");
  } else {
    const double kmax = static_cast<double>(std::min(dim, size));
    if (coder_param != std::floor(coder_param) || coder_param < 1.0 || coder_param > kmax)
      throw ValidationError("OMP cardinality must be an integer in [1, min(D, L)]");
  }
}

} // namespace idl
