#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

namespace idl {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Column norm below which an atom or observation is treated as zero.
inline constexpr double kZeroNorm = 1e-12;

/// A D×L matrix whose columns (atoms) have unit ℓ2 norm.
///
/// Construction renormalizes every column and rejects columns with norm
/// below kZeroNorm, as well as non-finite entries.
class Dictionary {
public:
  explicit Dictionary(Matrix atoms);

  const Matrix& atoms() const { return atoms_; }
  Index dim() const { return atoms_.rows(); }
  Index size() const { return atoms_.cols(); }
  auto atom(Index l) const { return atoms_.col(l); }

  bool operator==(const Dictionary& other) const { return atoms_ == other.atoms_; }

private:
  Matrix atoms_;
};

/// D×N matrix of observations, one per column.
class DataMatrix {
public:
  explicit DataMatrix(Matrix columns);

  const Matrix& columns() const { return columns_; }
  Index dim() const { return columns_.rows(); }
  Index n() const { return columns_.cols(); }
  auto column(Index i) const { return columns_.col(i); }

private:
  Matrix columns_;
};

struct SparseEntry {
  Index atom = 0;
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

/// Nonzero coefficients of one coded observation, in selection order.
using SparseColumn = std::vector<SparseEntry>;

/// L×N coefficient matrix stored as one (atom, coefficient) list per column.
class SparseCoding {
public:
  SparseCoding(Index num_atoms, Index num_columns);
  SparseCoding(Index num_atoms, std::vector<SparseColumn> columns);

  Index num_atoms() const { return num_atoms_; }
  Index num_columns() const { return static_cast<Index>(columns_.size()); }

  const SparseColumn& column(Index n) const { return columns_.at(static_cast<std::size_t>(n)); }
  void set_column(Index n, SparseColumn column);
  Index cardinality(Index n) const { return static_cast<Index>(column(n).size()); }

  /// Number of columns whose support contains each atom.
  std::vector<Index> atom_usage() const;

  SparseMatrix to_sparse() const;
  Matrix to_dense() const;

  bool operator==(const SparseCoding&) const = default;

private:
  void check_column(const SparseColumn& column) const;

  Index num_atoms_;
  std::vector<SparseColumn> columns_;
};

enum class CoderKind { Omp, Larc };

/// Parameters of the alternating training loop.
struct TrainConfig {
  double gamma = 0.0;
  int iterations = 25;
  CoderKind coder = CoderKind::Larc;
  // Cardinality K for OMP, residual coherence threshold for LARC.
  double coder_param = 0.2;
  int lbfgs_inner_iters = 10;
  int lbfgs_memory = 7;
  std::uint64_t seed = 0;

  /// Throws ValidationError when a field is out of range for a D×L dictionary.
  void validate(Index dim, Index size) const;
};

struct Histogram {
  std::vector<double> edges; // num_bins + 1 edges
  std::vector<std::uint64_t> counts;

  bool operator==(const Histogram&) const = default;
};

/// Frame statistics of a dictionary.
struct GramSummary {
  double mutual_coherence = 0.0;
  double welch_bound = 0.0;
  Histogram offdiag_histogram;
  std::vector<double> singular_values;
  double etf_flat_value = 0.0;
  // L <= D(D+1)/2, the size condition under which an ETF can attain the bound.
  bool etf_size_admissible = false;

  bool operator==(const GramSummary&) const = default;
};

} // namespace idl
