#pragma once

#include "idl/types.hpp"

#include <cstdint>

namespace idl {

struct SyntheticData {
  DataMatrix data;
  Dictionary planted;
  SparseCoding coding; // the generating coefficients
};

/// Planted-dictionary model: Gaussian atoms normalized to unit norm; each
/// observation is a combination of `sparsity` atoms on a uniformly random
/// support with standard normal weights, plus N(0, noise^2) per entry.
SyntheticData make_synthetic(Index dim, Index size, Index sparsity, Index n, double noise, std::uint64_t seed);

/// Fraction of planted atoms matched by some learned atom with
/// |<planted, learned>| >= threshold.
double atom_recovery_rate(const Dictionary& learned, const Dictionary& planted, double threshold);

/// Columns [0, count) and [count, N) as two data matrices.
std::pair<DataMatrix, DataMatrix> split_columns(const DataMatrix& data, Index count);

} // namespace idl
