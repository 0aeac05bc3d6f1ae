#include "nehari/spectral.hpp"

#include "nehari/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace nehari {
namespace {

// Largest-magnitude entry positive; near ties (mirror-symmetric modes) go to
// the lowest index so the choice does not depend on the solver.
void fix_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const double peak = vectors.col(c).cwiseAbs().maxCoeff();
    Eigen::Index arg = 0;
    while (std::abs(vectors(arg, c)) < (1.0 - 1e-6) * peak) ++arg;
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

void dense_solve(const DiscreteForms& forms, int k, Vec& values, Matrix& vectors) {
  const Vec scale = forms.mass.cwiseSqrt().cwiseInverse();
  Matrix C = Matrix(forms.A);
  C = scale.asDiagonal() * C * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(C);
  if (es.info() != Eigen::Success) throw NumericError("dense eigensolve failed");
  values = es.eigenvalues().head(k);
  vectors = scale.asDiagonal() * es.eigenvectors().leftCols(k);
}

// Shift-invert block Krylov with full M-reorthogonalization and Rayleigh-Ritz
// on the whole basis. The shift is 0: the operator is A^{-1} M.
void krylov_solve(const DiscreteForms& forms, int k, const EigenOptions& opts, Vec& values,
                  Matrix& vectors) {
  const Eigen::Index n = forms.size();
  const int b = std::max(1, opts.block_size);
  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max<Eigen::Index>(8 * k + 64, 200));
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;

  Matrix V(n, cap);
  Eigen::Index m = 0;
  auto m_dot = [&](const Vec& x, const Vec& y) { return inner_M(forms, x, y); };

  // Orthogonalize x against V[:, :m] twice; append if it survives.
  auto append = [&](Vec x) -> bool {
    const double before = std::sqrt(m_dot(x, x));
    for (int pass = 0; pass < 2; ++pass) {
      if (m > 0) {
        const Vec coeff = V.leftCols(m).transpose() * (forms.mass.asDiagonal() * x);
        x -= V.leftCols(m) * coeff;
      }
    }
    const double after = std::sqrt(m_dot(x, x));
    if (!(after > 1e-10 * before)) return false;
    V.col(m++) = x / after;
    return true;
  };
  auto random_vec = [&]() {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
    return x;
  };

  for (int j = 0; j < b && m < cap; ++j) append(random_vec());

  Eigen::Index block_start = 0;
  const Eigen::Index min_basis = std::min<Eigen::Index>(cap, 2 * k + 2 * b + 20);
  while (true) {
    // Extend the basis by one block.
    const Eigen::Index block_end = m;
    for (Eigen::Index c = block_start; c < block_end && m < cap; ++c) {
      Vec w = forms.solve_stiffness(forms.mass.asDiagonal() * V.col(c));
      if (!append(std::move(w)) && m < cap) append(random_vec());
    }
    block_start = block_end;

    if (m < min_basis && m < cap) continue;

    const Matrix Vm = V.leftCols(m);
    Matrix H = Vm.transpose() * (forms.A * Vm);
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    if (es.info() != Eigen::Success) throw NumericError("projected eigensolve failed");
    values = es.eigenvalues().head(k);
    vectors = Vm * es.eigenvectors().leftCols(k);

    bool converged = true;
    for (int c = 0; c < k && converged; ++c) {
      const Vec x = vectors.col(c);
      const Vec r = forms.A * x - values[c] * (forms.mass.asDiagonal() * x);
      const double res = std::sqrt(r.cwiseAbs2().cwiseQuotient(forms.mass).sum());
      converged = res <= opts.tol * values[c] * std::sqrt(m_dot(x, x));
    }
    if (converged) return;
    if (m >= cap || block_start >= m) {
      std::ostringstream msg;
      msg << "Krylov eigensolver did not converge with a basis of " << m << " vectors";
      throw NumericError(msg.str());
    }
  }
}

}  // namespace

int SpectralSplit::multiplicity(int k) const {
  if (k < 0 || k >= count()) return 0;
  return static_cast<int>(std::count(cluster.begin(), cluster.end(), cluster[static_cast<std::size_t>(k)]));
}

std::vector<int> cluster_eigenvalues(const Vec& eigenvalues, double rel_gap) {
  std::vector<int> id(static_cast<std::size_t>(eigenvalues.size()), 0);
  for (Eigen::Index k = 1; k < eigenvalues.size(); ++k) {
    const double gap = eigenvalues[k] - eigenvalues[k - 1];
    const bool same = gap <= rel_gap * std::abs(eigenvalues[k - 1]);
    id[static_cast<std::size_t>(k)] = id[static_cast<std::size_t>(k - 1)] + (same ? 0 : 1);
  }
  return id;
}

SpectralSplit eigenpairs(const DiscreteForms& forms, int k, const EigenOptions& opts) {
  const int n = static_cast<int>(forms.size());
  if (k < 1 || k > n) {
    std::ostringstream msg;
    msg << "requested " << k << " eigenpairs, must be in [1, " << n << "]";
    throw ConfigError(msg.str());
  }
  SpectralSplit s;
  if (n <= opts.dense_limit || 4 * k >= n)
    dense_solve(forms, k, s.eigenvalues, s.eigenvectors);
  else
    krylov_solve(forms, k, opts, s.eigenvalues, s.eigenvectors);
  if (!(s.eigenvalues.array() > 0.0).all())
    throw NumericError("non-positive eigenvalue: the curl-energy form lost definiteness");
  fix_signs(s.eigenvectors);
  s.cluster = cluster_eigenvalues(s.eigenvalues, opts.cluster_gap);
  return s;
}

int spectral_index(const Vec& eigenvalues, double lambda) {
  int nu = 1;
  while (nu - 1 < eigenvalues.size() && eigenvalues[nu - 1] + lambda <= 0.0) ++nu;
  return nu;
}

SpectralSplit split(SpectralSplit spec, double lambda) {
  if (lambda > 0.0) throw ConfigError("the spectral splitting requires lambda <= 0");
  const int nu = spectral_index(spec.eigenvalues, lambda);
  if (nu > spec.count()) {
    std::ostringstream msg;
    msg << "all " << spec.count() << " computed eigenvalues satisfy lambda_k + lambda <= 0 for "
        << "lambda = " << lambda << "; request more than " << spec.count() << " eigenpairs";
    throw NumericError(msg.str());
  }
  spec.lambda = lambda;
  spec.nu = nu;
  return spec;
}

SpectralSplit eigenpairs_for(const DiscreteForms& forms, double lambda, int k_min,
                             const EigenOptions& opts) {
  const int n = static_cast<int>(forms.size());
  int k = std::clamp(k_min, 1, n);
  while (true) {
    SpectralSplit s = eigenpairs(forms, k, opts);
    if (s.eigenvalues[k - 1] + lambda > 0.0 || k == n) return s;
    k = std::min(n, 2 * k);
  }
}

}  // namespace nehari
