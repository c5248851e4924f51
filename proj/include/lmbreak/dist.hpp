#pragma once

// Limit law of the CUSUM sup-statistic: the distribution of sup|B(t)| for a
// Brownian bridge B,
//
//   F(z) = 1 + 2 * sum_{k>=1} (-1)^k exp(-2 k^2 z^2),   z > 0.
//
// The alternating series converges like exp(-2k^2 z^2); two terms already give
// seven digits around the usual critical values. For z < 0.5 it cancels
// badly, so the cdf switches to the equivalent all-positive theta-function
// series there, which keeps it monotone down to z = 0.

namespace lmbreak {

class BridgeSupLaw {
 public:
  BridgeSupLaw() = default;
  /// Throws SpecError unless truncation_tolerance > 0 and max_terms >= 2.
  BridgeSupLaw(double truncation_tolerance, int max_terms);

  double cdf(double z) const;
  /// 1 - cdf(statistic); throws DomainError for negative or NaN input.
  double survival(double statistic) const;
  /// Bracket-and-bisect inversion of cdf; throws DomainError unless 0 < p < 1.
  double quantile(double p) const;

  double truncation_tolerance() const { return tolerance_; }
  int max_terms() const { return max_terms_; }

 private:
  double cdf_small(double z) const;

  double tolerance_ = 1e-15;
  int max_terms_ = 100;
};

/// Free-function forms using the default law (tolerance 1e-15, 100 terms).
double bridge_sup_cdf(double z);
double p_value(double statistic);
double bridge_sup_quantile(double p);

}  // namespace lmbreak
