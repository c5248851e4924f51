#include "lmbreak/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lmbreak/errors.hpp"

namespace lmbreak {
namespace {

constexpr double kDualBelow = 0.5;

}  // namespace

BridgeSupLaw::BridgeSupLaw(double truncation_tolerance, int max_terms)
    : tolerance_(truncation_tolerance), max_terms_(max_terms) {
  if (!(truncation_tolerance > 0.0)) throw SpecError("truncation tolerance must be positive");
  if (max_terms < 2) throw SpecError("max_terms must be at least 2");
}

double BridgeSupLaw::cdf(double z) const {
  if (std::isnan(z)) return z;
  if (z <= 0.0) return 0.0;
  if (z < kDualBelow) return cdf_small(z);
  const double z2 = z * z;
  double sum = 0.0;
  for (int k = 1; k <= max_terms_; ++k) {
    const double term = std::exp(-2.0 * k * k * z2);
    sum += (k % 2 == 1) ? -term : term;
    const double next = std::exp(-2.0 * (k + 1.0) * (k + 1.0) * z2);
    if (2.0 * next < tolerance_) break;
  }
  return std::clamp(1.0 + 2.0 * sum, 0.0, 1.0);
}

// Jacobi-transformed form F(z) = sqrt(2 pi)/z sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 z^2)):
// every term is positive, so small probabilities keep full relative accuracy.
double BridgeSupLaw::cdf_small(double z) const {
  const double c = std::numbers::pi * std::numbers::pi / (8.0 * z * z);
  double sum = 0.0;
  for (int k = 1; k <= max_terms_; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double term = std::exp(-odd * odd * c);
    sum += term;
    if (term <= tolerance_ * sum || term == 0.0) break;
  }
  return std::clamp(std::sqrt(2.0 * std::numbers::pi) / z * sum, 0.0, 1.0);
}

double BridgeSupLaw::survival(double statistic) const {
  if (!(statistic >= 0.0)) throw DomainError("statistic must be nonnegative");
  if (statistic < 1.0) return std::clamp(1.0 - cdf(statistic), 0.0, 1.0);
  // Same series summed as a tail, so far-tail p-values keep their magnitude
  // instead of collapsing to 1 - 1 = 0.
  const double z2 = statistic * statistic;
  double sum = 0.0;
  for (int k = 1; k <= max_terms_; ++k) {
    const double term = std::exp(-2.0 * k * k * z2);
    sum += (k % 2 == 1) ? term : -term;
    if (term == 0.0 || 2.0 * std::exp(-2.0 * (k + 1.0) * (k + 1.0) * z2) < tolerance_ * term) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double BridgeSupLaw::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0,1)");
  double lo = 0.0;
  double hi = 1.0;
  while (cdf(hi) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f = cdf(mid);
    if (std::abs(f - p) <= 1e-12 || mid == lo || mid == hi) return mid;
    if (f < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bridge_sup_cdf(double z) { return BridgeSupLaw{}.cdf(z); }
double p_value(double statistic) { return BridgeSupLaw{}.survival(statistic); }
double bridge_sup_quantile(double p) { return BridgeSupLaw{}.quantile(p); }

}  // namespace lmbreak
