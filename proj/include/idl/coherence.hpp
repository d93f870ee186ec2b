#pragma once

#include "idl/types.hpp"

#include <cstdint>

namespace idl {

/// Largest off-diagonal |<d_i, d_j>|, clamped to [0, 1]. Requires L >= 2.
double mutual_coherence(const Dictionary& dict);

/// Welch lower bound on the mutual coherence of L unit vectors in R^D.
/// Zero when L <= D (an orthonormal set exists) or L == 1.
double welch_bound(Index dim, Index size);

/// Largest k with k < (1 + 1/mu) / 2, the exact-recovery cardinality.
std::int64_t erc_max_cardinality(double mu);

/// Histogram of |G_ij|, i < j, over num_bins equal-width bins covering [0, 1].
Histogram gram_offdiag_histogram(const Dictionary& dict, int num_bins);

/// Singular values of the atom matrix, descending, length min(D, L).
std::vector<double> singular_spectrum(const Dictionary& dict);

/// sqrt(L / D): the flat singular value of an ETF of this shape.
double etf_flat_value(Index dim, Index size);

GramSummary gram_summary(const Dictionary& dict, int num_bins);

} // namespace idl
