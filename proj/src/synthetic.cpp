#include "idl/synthetic.hpp"

#include "idl/errors.hpp"

#include <numeric>
#include <random>

namespace idl {

SyntheticData make_synthetic(Index dim, Index size, Index sparsity, Index n, double noise, std::uint64_t seed) {
  if (dim < 1 || size < 1 || n < 1)
    throw ValidationError("synthetic dimensions must be positive");
  if (sparsity < 1 || sparsity > dim || sparsity > size)
    throw ValidationError("sparsity must lie in [1, min(D, L)]");
  if (!(noise >= 0.0))
    throw ValidationError("noise level must be nonnegative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix atoms(dim, size);
  for (Index l = 0; l < size; ++l) {
    do {
      for (Index i = 0; i < dim; ++i)
        atoms(i, l) = normal(rng);
    } while (atoms.col(l).norm() < kZeroNorm);
  }
  Dictionary planted(std::move(atoms));

  std::vector<Index> pool(static_cast<std::size_t>(size));
  std::vector<SparseColumn> columns(static_cast<std::size_t>(n));
  Matrix data = Matrix::Zero(dim, n);
  for (Index j = 0; j < n; ++j) {
    std::iota(pool.begin(), pool.end(), Index{0});
    auto& col = columns[static_cast<std::size_t>(j)];
    for (Index k = 0; k < sparsity; ++k) {
      std::uniform_int_distribution<Index> pick(k, size - 1);
      std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick(rng))]);
      const Index atom = pool[static_cast<std::size_t>(k)];
      const double weight = normal(rng);
      col.push_back({atom, weight});
      data.col(j) += weight * planted.atom(atom);
    }
    if (noise > 0.0)
      for (Index i = 0; i < dim; ++i)
        data(i, j) += noise * normal(rng);
  }
  return {DataMatrix(std::move(data)), std::move(planted), SparseCoding(size, std::move(columns))};
}

double atom_recovery_rate(const Dictionary& learned, const Dictionary& planted, double threshold) {
  if (learned.dim() != planted.dim())
    throw ValidationError("dictionaries have different dimensions");
  const Matrix overlap = (planted.atoms().transpose() * learned.atoms()).cwiseAbs();
  Index hits = 0;
  for (Index p = 0; p < overlap.rows(); ++p)
    if (overlap.row(p).maxCoeff() >= threshold)
      ++hits;
  return static_cast<double>(hits) / static_cast<double>(planted.size());
}

std::pair<DataMatrix, DataMatrix> split_columns(const DataMatrix& data, Index count) {
  if (count < 1 || count >= data.n())
    throw ValidationError("split must leave at least one column on each side");
  return {DataMatrix(data.columns().leftCols(count)), DataMatrix(data.columns().rightCols(data.n() - count))};
}

} // namespace idl
