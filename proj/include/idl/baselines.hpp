#pragma once

#include "idl/types.hpp"

#include <cstdint>

namespace idl {

struct KsvdUpdateResult {
  Dictionary dictionary;
  SparseCoding coding;
};

/// K-SVD dictionary step: each atom, in index order, is refit together with
/// its coefficient row as the dominant singular pair of the residual
/// restricted to the columns that use it. Atoms with empty support are left
/// alone. The approximation error never increases.
KsvdUpdateResult ksvd_atom_update(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding);

struct ReplaceResult {
  Dictionary dictionary;
  std::vector<Index> replaced;
  // True when a replacement was needed but no unused nonzero data column was left.
  bool exhausted = false;
};

/// Coherence-threshold atom replacement. Pairs (d, e), d < e, are scanned in
/// lexicographic order; when |<d_d, d_e>| > mu_t, atom e becomes the unused
/// data column with the largest approximation residual, normalized. The
/// result is not guaranteed to satisfy mu <= mu_t.
ReplaceResult ksvd_replace(const Dictionary& dict, const DataMatrix& data, const SparseCoding& coding, double mu_t);

struct AtomPair {
  Vector first;
  Vector second;
};

/// Opens the angle between two unit vectors symmetrically about their
/// (sign-aligned) bisector until |<a, b>| = mu_t, keeping the sign of the
/// inner product. Pairs already at or below mu_t (with 1e-10 slack) are returned unchanged.
/// For a = ±b the rotation plane is span{a, e_k} with k the smallest index
/// where |a_k| is not maximal.
AtomPair inksvd_decorrelate_pair(const Vector& a, const Vector& b, double mu_t);

struct DecorrelationReport {
  std::uint64_t pair_updates = 0;
  std::uint64_t sweeps = 0;
  bool converged = false;
  double final_coherence = 0.0;

  bool operator==(const DecorrelationReport&) const = default;
};

struct DecorrelationResult {
  Dictionary dictionary;
  DecorrelationReport report;
};

inline constexpr std::uint64_t kDefaultMaxPairUpdates = 1'000'000;

/// INK-SVD style decorrelation: sweep all pairs lexicographically, opening any
/// pair above mu_t, until a sweep changes nothing or the update budget runs out.
DecorrelationResult inksvd_decorrelate(const Dictionary& dict, double mu_t,
                                       std::uint64_t max_pair_updates = kDefaultMaxPairUpdates);

} // namespace idl
