#pragma once

// Quantitative diagnostics built on the Nehari engine: the discrete Sobolev
// constant S_h, energy bounds, ground states, lambda sweeps, the threshold
// eps_nu, the multiplicity count m~ and bubble rescaling.

#include "nehari/curlcurl.hpp"
#include "nehari/forms.hpp"
#include "nehari/nehari.hpp"
#include "nehari/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nehari {

struct SobolevResult {
  double value = 0.0;  ///< S_h = min |phi|_A^2 / |phi|_q^2
  Vec field;           ///< minimizer, |field|_A = 1
  double grad_norm = 0.0;
  int iterations = 0;
  int start_index = 0;
  std::vector<double> start_values;
};

struct SobolevOptions {
  double tol = 1e-9;
  int max_iter = 20000;
  int eigen_starts = 3;
  /// Grid-scale bumps on the axis; at p = 6 the discrete infimum concentrates there.
  bool concentration_starts = true;
  int random_starts = 0;
  std::uint64_t seed = 0;
};

/// Axis-centred bumps r exp(-(r^2 + (z - z_c)^2) / (2 s^2)) for s in {1, 2, 4} h
/// and z_c at the quartiles of the axis-adjacent unknowns.
std::vector<Vec> concentration_starts(const MeridianGrid& grid);

/// Discrete S_h over the symmetric space; q in [2, 6]. Unit volume weights,
/// so with unit permittivity S_h(2) = lambda_1.
SobolevResult compute_S(const DiscreteForms& forms, double q, const SobolevOptions& opts = {});

struct EnergyBounds {
  double lambda = 0.0;
  double p = 0.0;
  double S = 0.0;
  double mu_omega = 0.0;
  int nu = 1;
  double lambda_nu = 0.0;
  double window_lo = 0.0;  ///< -lambda_nu (open)
  double window_hi = 0.0;  ///< -lambda_{nu-1} or 0 (closed)
  double upper = 0.0;      ///< (1/2 - 1/p)(lambda + lambda_nu)^{p/(p-2)} mu
  double lower = 0.0;      ///< (1/2 - 1/p) S^{p/(p-2)}, bound on c_0
  double beta0 = 0.0;
  double threshold = 0.0;  ///< S mu^{(2-p)/p}
  bool precondition = false;  ///< lambda + lambda_nu < threshold
  bool sanity = false;        ///< threshold <= lambda_nu
};

/// Throws ConfigError for lambda outside (-lambda_K, 0] or when expected_nu is
/// given and lambda is not in its window (the message names the right one).
EnergyBounds energy_bounds(const SpectralSplit& spectrum, double S, double p, double mu_omega,
                           double lambda, std::optional<int> expected_nu = std::nullopt);

struct GroundStateOptions {
  double tol = 1e-8;
  int max_iter = 5000;
  /// Lowest eigenvectors of X+ used as start directions.
  int eigen_starts = 3;
  bool concentration_starts = true;
  int random_starts = 0;
  std::uint64_t seed = 0;
  Flavor flavor = Flavor::Full;
  EigenOptions eigen;
  /// Tried first, e.g. the previous point of a sweep.
  std::optional<Vec> warm_start;
};

struct GroundStateResult {
  Vec field;
  double energy = 0.0;
  double lambda = 0.0;
  double p = 0.0;
  double residual = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;  ///< not written to outputs
  int start_index = 0;
  int nu = 1;
  double lp_norm = 0.0;  ///< |phi|_p with unit weights
  double a_norm = 0.0;   ///< |phi|_A
  double m_quad = 0.0;   ///< phi' M phi
  double power = 0.0;    ///< sum w |phi|^p
  std::optional<double> upper_bound;
  std::vector<double> start_energies;

  /// |c - (1/2 - 1/p) sum w|phi|^p| / c
  double manifold_gap() const;
};

/// Minimizes J_lambda over the Nehari-Pankov manifold. The spectrum must reach
/// past -lambda. When the materials are unit the result is checked against
/// the upper bound and a violation throws NumericError.
GroundStateResult ground_state(const DiscreteForms& forms, const SpectralSplit& spectrum,
                               double lambda, const GroundStateOptions& opts = {});
GroundStateResult ground_state(const DiscreteForms& forms, double lambda,
                               const GroundStateOptions& opts = {});

struct SweepPoint {
  double lambda = 0.0;
  int nu = 1;
  bool attained = false;  ///< the solver converged
  double energy = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  double residual = 0.0;
  double m_quad = 0.0;
  std::string error;
};

struct SweepOptions {
  GroundStateOptions ground;
  int threads = 1;
  double slack = 1e-6;
  /// S_h for the lower bound; computed when absent.
  std::optional<double> S;
};

struct SweepResult {
  std::vector<SweepPoint> points;  ///< ascending in lambda
  Vec spectrum;
  double S = 0.0;
  bool monotone = true;            ///< non-decreasing within each window up to slack
  bool strictly_increasing = true;
  bool continuity = true;          ///< |dc| <= L dlambda between neighbours
  double lipschitz = 0.0;          ///< max 1/2 phi'M phi over the minimizers
  std::vector<std::string> notes;
};

SweepResult lambda_sweep(const DiscreteForms& forms, std::vector<double> lambdas,
                         const SweepOptions& opts = {});

struct EpsProbe {
  double eps = 0.0;
  double lambda = 0.0;
  double energy = 0.0;
  std::string decision;  ///< below, above, undecided
};

struct EpsNuResult {
  int nu = 1;
  double lambda_nu = 0.0;
  double c0 = 0.0;
  double S = 0.0;
  double lower_bound = 0.0;  ///< S mu^{(2-p)/p}
  double eps_hat = 0.0;      ///< largest eps certified with c < c0
  double eps_upper = 0.0;    ///< bracket end
  double gap_tol = 0.0;      ///< a comparison counts when c0 - c exceeds this
  std::vector<EpsProbe> probes;
  std::vector<std::string> warnings;
};

struct EpsNuOptions {
  GroundStateOptions ground;
  /// Bracket width relative to lambda_nu.
  double width = 1e-3;
  double gap_factor = 3.0;
  std::optional<double> S;
};

EpsNuResult estimate_eps_nu(const DiscreteForms& forms, int nu, const EpsNuOptions& opts = {});

struct MultiplicityCount {
  int count = 0;
  double lo = 0.0;  ///< open eigenvalue window (lo, hi)
  double hi = 0.0;
  std::vector<int> indices;         ///< 1-based
  std::vector<int> multiplicities;  ///< cluster size per index
};

/// m~(lambda) = #{k : -lambda_k < lambda < -lambda_k + S mu^{(2-p)/p}}.
/// Throws NumericError when the computed spectrum does not exhaust the window.
MultiplicityCount count_m_tilde(const SpectralSplit& spectrum, double S, double p,
                                double mu_omega, double lambda);

struct AnisoConstants {
  double mu_inf = 1.0;
  double V_inf = 1.0;
  double Gamma_inf = 1.0;
  double Gamma_0 = 1.0;
};

struct AnisoReport {
  AnisoConstants constants;
  double kappa = 0.0;  ///< V_inf mu_inf (Gamma_inf / Gamma_0)^{2/p}
  double threshold = 0.0;
  MultiplicityCount count;
  double d_lower = 0.0;        ///< with the 1/p normalization used here
  double d_lower_gamma = 0.0;  ///< with F = |Gamma E|^p
  std::optional<double> c_upper;
  std::optional<double> c_upper_gamma;
};

/// m~ = #{k : 0 < (lambda_k - 1) kappa < S mu^{(2-p)/p}} with the bounds on
/// d and c. The spectrum is that of (A_mu, M_V).
AnisoReport count_m_tilde_aniso(const SpectralSplit& spectrum, const MaterialField& materials,
                                double S, double p, double mu_omega);

struct BubbleResult {
  Vec field;
  double eps = 1.0;
  double z0 = 0.0;
  double l6_norm = 0.0;
  double a_norm = 0.0;
  double j0 = 0.0;
  std::vector<double> test_inner;  ///< <phi_eps, psi>_M
};

/// phi_eps(r, z) = eps^{-1/2} phi(r / eps, (z - z0) / eps + z0), bilinear on
/// the grid with zero extension. Throws ConfigError for eps outside (0, 1] or
/// when the rescaled support leaves the domain.
BubbleResult bubble(const DiscreteForms& forms, const Vec& phi, double eps, double z0,
                    const std::vector<Vec>& tests = {});

struct ContinuityEntry {
  double lambda = 0.0;
  double energy = 0.0;
  double energy_gap = 0.0;  ///< |c - c_ref|
  double distance = 0.0;    ///< min |E -+ E_ref|_M
  double bound = 0.0;       ///< L |lambda - lambda_ref|
  bool within = false;
};

struct ContinuityReport {
  double lambda_ref = 0.0;
  double energy_ref = 0.0;
  std::vector<ContinuityEntry> entries;
  bool energy_continuous = true;
};

/// Ground states along a sequence in the window of lambda_ref.
ContinuityReport continuity_of_ground_states(const DiscreteForms& forms, double lambda_ref,
                                             const std::vector<double>& sequence,
                                             const GroundStateOptions& opts = {});

struct BoundStateReport {
  MultiplicityCount count;
  double beta0 = 0.0;
  std::vector<CriticalPoint> states;
};

/// Multi-start search seeded by the eigenvectors in the m~ window (or the
/// first X+ eigenvector when the window is empty), capped at beta0.
BoundStateReport bound_states(const DiscreteForms& forms, const SpectralSplit& spectrum,
                              double S, double lambda, const GroundStateOptions& opts = {},
                              double dedup_tol = 1e-3);

}  // namespace nehari
