#include "idl/coherence.hpp"

#include "idl/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace idl {

double mutual_coherence(const Dictionary& dict) {
  if (dict.size() < 2)
    throw ValidationError("mutual coherence needs at least two atoms");
  const Matrix gram = dict.atoms().transpose() * dict.atoms();
  double mu = 0.0;
  for (Index j = 1; j < gram.cols(); ++j)
    for (Index i = 0; i < j; ++i)
      mu = std::max(mu, std::abs(gram(i, j)));
  return std::clamp(mu, 0.0, 1.0);
}

double welch_bound(Index dim, Index size) {
  if (dim < 1 || size < 1)
    throw ValidationError("welch bound needs positive dimensions");
  if (size <= dim)
    return 0.0;
  const auto d = static_cast<double>(dim);
  const auto l = static_cast<double>(size);
  return std::sqrt((l - d) / (d * (l - 1.0)));
}

std::int64_t erc_max_cardinality(double mu) {
  if (!(mu > 0.0) || mu > 1.0)
    throw ValidationError("ERC cardinality needs mu in (0, 1]");
  const double bound = 0.5 * (1.0 + 1.0 / mu);
  // Largest integer strictly below the bound; a bound within rounding of an
  // integer counts as that integer.
  auto k = static_cast<std::int64_t>(std::ceil(bound * (1.0 - 1e-12))) - 1;
  return std::max<std::int64_t>(k, 0);
}

Histogram gram_offdiag_histogram(const Dictionary& dict, int num_bins) {
  if (dict.size() < 2)
    throw ValidationError("Gram histogram needs at least two atoms");
  if (num_bins < 1)
    throw ValidationError("histogram needs at least one bin");

  Histogram h;
  h.edges.resize(static_cast<std::size_t>(num_bins) + 1);
  for (int b = 0; b <= num_bins; ++b)
    h.edges[static_cast<std::size_t>(b)] = static_cast<double>(b) / num_bins;
  h.counts.assign(static_cast<std::size_t>(num_bins), 0);

  const Matrix gram = dict.atoms().transpose() * dict.atoms();
  for (Index j = 1; j < gram.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      const double scaled = std::min(std::abs(gram(i, j)), 1.0) * num_bins;
      // Values within rounding of a bin edge belong to the bin above it.
      const double snapped = std::abs(scaled - std::round(scaled)) < 1e-9 ? std::round(scaled) : scaled;
      const int bin = std::min(static_cast<int>(std::floor(snapped)), num_bins - 1);
      ++h.counts[static_cast<std::size_t>(bin)];
    }
  }
  return h;
}

std::vector<double> singular_spectrum(const Dictionary& dict) {
  const Matrix& a = dict.atoms();
  // Eigenvalues of the smaller of A A^T and A^T A.
  const Matrix frame = a.rows() <= a.cols() ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(frame, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition of the frame operator failed");

  std::vector<double> sigma(static_cast<std::size_t>(frame.rows()));
  for (Index i = 0; i < frame.rows(); ++i) {
    double lambda = eig.eigenvalues()(i);
    if (lambda < 0.0) {
      if (lambda < -1e-10)
        throw NumericError("frame operator has a negative eigenvalue");
      lambda = 0.0;
    }
    sigma[static_cast<std::size_t>(i)] = std::sqrt(lambda);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

double etf_flat_value(Index dim, Index size) {
  if (dim < 1 || size < 1)
    throw ValidationError("ETF flat value needs positive dimensions");
  return std::sqrt(static_cast<double>(size) / static_cast<double>(dim));
}

GramSummary gram_summary(const Dictionary& dict, int num_bins) {
  GramSummary s;
  s.mutual_coherence = mutual_coherence(dict);
  s.welch_bound = welch_bound(dict.dim(), dict.size());
  s.offdiag_histogram = gram_offdiag_histogram(dict, num_bins);
  s.singular_values = singular_spectrum(dict);
  s.etf_flat_value = etf_flat_value(dict.dim(), dict.size());
  s.etf_size_admissible = dict.size() <= dict.dim() * (dict.dim() + 1) / 2;
  return s;
}

} // namespace idl
