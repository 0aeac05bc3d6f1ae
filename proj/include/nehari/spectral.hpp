#pragma once

// Lowest eigenpairs of A phi = lambda_k M phi and the splitting of the
// symmetric space into the semi-negative part (eigenvectors with
// lambda_k + lambda <= 0) and its positive complement.

#include "nehari/forms.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace nehari {

using Matrix = Eigen::MatrixXd;

struct EigenOptions {
  /// Dense solve at or below this many unknowns, block Krylov otherwise.
  int dense_limit = 400;
  int block_size = 4;
  /// Relative residual |A x - theta M x|_{M^-1} / (theta |x|_M).
  double tol = 1e-10;
  /// Relative gap below which neighbouring eigenvalues share a cluster.
  double cluster_gap = 1e-6;
  std::uint64_t seed = 0x5eedULL;
};

struct SpectralSplit {
  Vec eigenvalues;          ///< ascending, strictly positive
  Matrix eigenvectors;      ///< columns M-orthonormal and A-orthogonal
  std::vector<int> cluster; ///< multiplicity-cluster id per eigenvalue
  std::optional<double> lambda;
  /// 1-based index of the first eigenvalue with lambda_k + lambda > 0.
  int nu = 1;

  int count() const noexcept { return static_cast<int>(eigenvalues.size()); }
  int tilde_dim() const noexcept { return nu - 1; }
  /// Columns spanning the semi-negative subspace (M-normalized).
  Matrix tilde_basis() const { return eigenvectors.leftCols(tilde_dim()); }
  /// Size of the cluster containing the 0-based index k.
  int multiplicity(int k) const;
};

/// k lowest eigenpairs; sign fixed so the largest-magnitude entry is positive.
SpectralSplit eigenpairs(const DiscreteForms& forms, int k, const EigenOptions& opts = {});

/// Throws ConfigError for lambda > 0 and NumericError if every computed
/// eigenvalue satisfies lambda_k + lambda <= 0 (more eigenpairs are needed).
SpectralSplit split(SpectralSplit spec, double lambda);

/// Computes enough eigenpairs that lambda_K + lambda > 0 and at least k_min.
SpectralSplit eigenpairs_for(const DiscreteForms& forms, double lambda, int k_min,
                             const EigenOptions& opts = {});

std::vector<int> cluster_eigenvalues(const Vec& eigenvalues, double rel_gap);

/// 1-based nu for lambda over a computed ascending spectrum.
int spectral_index(const Vec& eigenvalues, double lambda);

}  // namespace nehari
