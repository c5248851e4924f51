#pragma once

// Large-sample quantities behind the test: the drift T(tau) of the normalised
// CUSUM under a smooth mean transition, the limits of sigma_hat^2 under the
// abrupt and smooth alternatives, and Monte Carlo diagnostics for the
// partial-sum process W_n and the null law.

#include <Eigen/Core>

#include <cstdint>
#include <span>

#include "lmbreak/core.hpp"
#include "lmbreak/signals.hpp"

namespace lmbreak {

/// Error function, absolute error below 1e-12 and exactly odd.
double erf(double x);

enum class DriftMethod { quadrature, closed_form };

struct DriftEvaluation {
  double tau = 0.0;
  double value = 0.0;
  DriftMethod method = DriftMethod::quadrature;
};

/// T(tau) = int_0^tau F - tau int_0^1 F by adaptive quadrature (abs tol 1e-10).
DriftEvaluation drift_quadrature(const TransitionSpec& spec, double tau);

/// Closed form for the logistic transition from the antiderivative
/// G(x) = log(1 + exp(gamma (x - tau1))) / gamma:
///   T(tau) = G(tau) - G(0) - tau (G(1) - G(0)).
/// The softplus is evaluated with log1p so large gamma does not overflow.
DriftEvaluation drift_closed_logistic(double tau1, double gamma, double tau);

/// Closed form for the exponential transition. With c = sqrt(pi / (4 gamma))
/// and g = sqrt(gamma):
///   T(tau) = c { (tau - 1) erf(g tau1) + erf(g (tau1 - tau)) + tau erf(g (1 - tau1)) }.
/// Direct integration gives the last term as written here; a variant with
/// -tau erf(g (tau1 - tau)) in its place does not agree with quadrature.
DriftEvaluation drift_closed_exponential(double tau1, double gamma, double tau);

/// max over a uniform grid of |T| (quadrature); positive for any
/// non-constant transition.
double max_abs_drift(const TransitionSpec& spec, int grid_points = 99);

struct LimitVariance {
  double sigma_star2 = 0.0;
  double sigma_bar2 = 0.0;
  double shift_contribution = 0.0;  // sigma_star2 - sigma_bar2 >= 0
};

/// Limit of sigma_hat^2 under an abrupt mean shift at tau1:
/// sigma_bar2 + tau1 (1 - tau1) (mu1 - mu2)^2.
LimitVariance limit_variance_abrupt(double tau1, double mu1, double mu2, double sigma_bar2);

/// Limit under a smooth transition: sigma_bar2 + (mu2 - mu1)^2 (int F^2 - (int F)^2).
LimitVariance limit_variance_smooth(const TransitionSpec& spec, double mu1, double mu2,
                                    double sigma_bar2);

/// W_n(k/n) = (1 / (sigma_bar sqrt(n))) sum_{t<=k} sigma_t eps_t for k = 0..n.
Series wn_path(std::span<const double> noise_scaled, double sigma_bar2);

/// Theoretical covariance of the limit of W_n for a volatility profile:
/// (1/sigma_bar2) int_0^min(a,b) sigma(x)^2 dx. Equals min(a,b) only when
/// sigma is constant.
Eigen::MatrixXd wn_limit_covariance(const SigmaSpec& sigma, std::span<const double> taus);

/// Empirical covariance matrix of (W_n(tau_1), ..., W_n(tau_r)) over
/// `replications` draws of sigma_t eps_t, normalised by the ergodic limit of
/// `sigma`. Replication r uses seed derive_seed({seed, r}).
Eigen::MatrixXd wn_covariance(const SigmaSpec& sigma, Eigen::Index n,
                              std::span<const double> taus, int replications,
                              std::uint64_t seed, int workers = 1);

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `statistics` and the Brownian-bridge sup law.
double ks_distance_to_bridge_law(std::span<const double> statistics);

}  // namespace lmbreak
