#include "lmbreak/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lmbreak/dist.hpp"
#include "lmbreak/parallel.hpp"
#include "lmbreak/quadrature.hpp"

namespace lmbreak {
namespace {

constexpr double kQuadTol = 1e-10;

double integral_of_transition(const TransitionSpec& spec, double upper) {
  const auto breaks = transition_breakpoints(spec);
  return integrate([&spec](double x) { return transition(spec, x); }, 0.0, upper, kQuadTol,
                   breaks)
      .value;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

double erf(double x) {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  if (ax == 0.0) return x;
  if (ax >= 6.0) return std::copysign(1.0, x);
  if (ax >= 3.0) {
    // erfc(x) = exp(-x^2) / sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
    // evaluated bottom-up; 60 levels are ample for x >= 3.
    double f = ax;
    for (int k = 60; k >= 1; --k) f = ax + 0.5 * k / f;
    const double erfc = std::exp(-ax * ax) * std::numbers::inv_sqrtpi / f;
    return std::copysign(1.0 - erfc, x);
  }
  // erf(x) = 2/sqrt(pi) exp(-x^2) sum_k 2^k x^(2k+1) / (1*3*...*(2k+1)); all
  // terms are positive so there is no cancellation.
  const double x2 = ax * ax;
  double term = ax;
  double sum = ax;
  for (int k = 1; k < 500; ++k) {
    term *= 2.0 * x2 / (2.0 * k + 1.0);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  const double value = std::min(1.0, 2.0 * std::numbers::inv_sqrtpi * std::exp(-x2) * sum);
  return std::copysign(value, x);
}

DriftEvaluation drift_quadrature(const TransitionSpec& spec, double tau) {
  spec.validate();
  DriftEvaluation out{tau, 0.0, DriftMethod::quadrature};
  if (tau == 0.0) return out;
  const double full = integral_of_transition(spec, 1.0);
  const double partial = tau == 1.0 ? full : integral_of_transition(spec, tau);
  out.value = partial - tau * full;
  return out;
}

DriftEvaluation drift_closed_logistic(double tau1, double gamma, double tau) {
  TransitionSpec{TransitionFamily::logistic, tau1, gamma}.validate();
  const auto antiderivative = [&](double x) { return softplus(gamma * (x - tau1)) / gamma; };
  const double g0 = antiderivative(0.0);
  const double partial = antiderivative(tau) - g0;
  const double full = antiderivative(1.0) - g0;
  return {tau, partial - tau * full, DriftMethod::closed_form};
}

DriftEvaluation drift_closed_exponential(double tau1, double gamma, double tau) {
  TransitionSpec{TransitionFamily::exponential, tau1, gamma}.validate();
  const double c = std::sqrt(std::numbers::pi / (4.0 * gamma));
  const double g = std::sqrt(gamma);
  const double value = c * ((tau - 1.0) * lmbreak::erf(g * tau1) +
                            lmbreak::erf(g * (tau1 - tau)) + tau * lmbreak::erf(g * (1.0 - tau1)));
  return {tau, value, DriftMethod::closed_form};
}

double max_abs_drift(const TransitionSpec& spec, int grid_points) {
  double best = 0.0;
  for (int i = 1; i <= grid_points; ++i) {
    const double tau = static_cast<double>(i) / (grid_points + 1);
    best = std::max(best, std::abs(drift_quadrature(spec, tau).value));
  }
  return best;
}

LimitVariance limit_variance_abrupt(double tau1, double mu1, double mu2, double sigma_bar2) {
  if (!(tau1 > 0.0 && tau1 < 1.0)) throw DomainError("break fraction must lie in (0,1)");
  if (!(sigma_bar2 > 0.0)) throw DomainError("sigma_bar2 must be positive");
  const double d = mu1 - mu2;
  const double shift = tau1 * (1.0 - tau1) * d * d;
  return {sigma_bar2 + shift, sigma_bar2, shift};
}

LimitVariance limit_variance_smooth(const TransitionSpec& spec, double mu1, double mu2,
                                    double sigma_bar2) {
  spec.validate();
  if (!(sigma_bar2 > 0.0)) throw DomainError("sigma_bar2 must be positive");
  const auto breaks = transition_breakpoints(spec);
  const double mean_f = integral_of_transition(spec, 1.0);
  const double mean_f2 = integrate(
                             [&spec](double x) {
                               const double f = transition(spec, x);
                               return f * f;
                             },
                             0.0, 1.0, kQuadTol, breaks)
                             .value;
  const double d = mu2 - mu1;
  // Variance of F(U), U uniform; clipped at 0 against quadrature round-off.
  const double shift = d * d * std::max(0.0, mean_f2 - mean_f * mean_f);
  return {sigma_bar2 + shift, sigma_bar2, shift};
}

Series wn_path(std::span<const double> noise_scaled, double sigma_bar2) {
  if (!(sigma_bar2 > 0.0)) throw DomainError("sigma_bar2 must be positive");
  const auto n = static_cast<Eigen::Index>(noise_scaled.size());
  Series out(n + 1);
  out(0) = 0.0;
  if (n == 0) return out;
  const double norm = 1.0 / (std::sqrt(sigma_bar2) * std::sqrt(static_cast<double>(n)));
  CompensatedSum<double> acc;
  for (Eigen::Index t = 0; t < n; ++t) {
    acc.add(noise_scaled[static_cast<std::size_t>(t)]);
    out(t + 1) = acc.value() * norm;
  }
  return out;
}

Eigen::MatrixXd wn_limit_covariance(const SigmaSpec& sigma, std::span<const double> taus) {
  const double bar2 = ergodic_variance_limit(sigma);
  const auto breaks = sigma_breakpoints(sigma);
  const auto r = static_cast<Eigen::Index>(taus.size());
  Eigen::MatrixXd cov(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      const double upper = std::min(taus[static_cast<std::size_t>(i)], taus[static_cast<std::size_t>(j)]);
      const double clock = integrate(
                               [&sigma](double x) {
                                 const double v = sigma_at(sigma, x);
                                 return v * v;
                               },
                               0.0, upper, kQuadTol, breaks)
                               .value;
      cov(i, j) = clock / bar2;
    }
  }
  return cov;
}

Eigen::MatrixXd wn_covariance(const SigmaSpec& sigma, Eigen::Index n,
                              std::span<const double> taus, int replications,
                              std::uint64_t seed, int workers) {
  if (replications < 2) throw DomainError("need at least two replications");
  const double bar2 = ergodic_variance_limit(sigma);
  const SeriesGenerator gen(ConstantMean{0.0}, sigma, n);
  const auto r = static_cast<Eigen::Index>(taus.size());
  std::vector<Eigen::Index> idx;
  for (double tau : taus) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0,1]");
    idx.push_back(static_cast<Eigen::Index>(std::floor(tau * static_cast<double>(n) + 1e-9)));
  }
  Eigen::MatrixXd samples(replications, r);
  detail::parallel_for(replications, workers, [&](std::int64_t rep) {
    const Series noise = gen.draw_noise(derive_seed({seed, static_cast<std::uint64_t>(rep)}));
    const Series w = wn_path({noise.data(), static_cast<std::size_t>(noise.size())}, bar2);
    for (Eigen::Index j = 0; j < r; ++j) samples(rep, j) = w(idx[static_cast<std::size_t>(j)]);
  });
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centred = samples.rowwise() - mean;
  return (centred.transpose() * centred) / static_cast<double>(replications - 1);
}

double ks_distance_to_bridge_law(std::span<const double> statistics) {
  std::vector<double> sorted(statistics.begin(), statistics.end());
  if (sorted.empty()) throw InsufficientData("no statistics supplied");
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = bridge_sup_cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

}  // namespace lmbreak
