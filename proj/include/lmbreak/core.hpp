#pragma once

// Data transforms, null-model estimates, the CUSUM process B_n(k/n) and the
// sup-statistic test for a change in the mean.
//
// Everything here is a template over an Eigen dense expression so callers can
// pass vectors, maps over foreign buffers, or lazy expressions
// (`lm_test(y.array().abs().matrix(), 0.05)`) without materialising copies.

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "lmbreak/dist.hpp"
#include "lmbreak/errors.hpp"

namespace lmbreak {

template <typename Scalar>
using SeriesX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Series = SeriesX<double>;

template <typename Scalar>
struct NullEstimatesX {
  Scalar mu_hat;
  Scalar sigma2_hat;  // divisor n
};
using NullEstimates = NullEstimatesX<double>;

template <typename Scalar>
struct CusumPathX {
  SeriesX<Scalar> points;  // points[k] = B_n(k/n), k = 0..n
  Scalar scale;            // sigma_hat
};
using CusumPath = CusumPathX<double>;

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  Eigen::Index break_index = 0;
  bool reject = false;
};

/// Neumaier-compensated accumulator.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + carry_; }

 private:
  Scalar sum_{0};
  Scalar carry_{0};
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y(i))) {
      throw DomainError("non-finite observation at index " + std::to_string(i));
    }
  }
}

template <typename Derived>
void require_length(const Eigen::MatrixBase<Derived>& y, Eigen::Index min_len) {
  if (y.size() < min_len) {
    throw InsufficientData("need at least " + std::to_string(min_len) +
                           " observations, got " + std::to_string(y.size()));
  }
}

}  // namespace detail

/// Log returns r_t = log P_{t+1} - log P_t; output has one element fewer.
template <typename Derived>
SeriesX<typename Derived::Scalar> compute_returns(const Eigen::MatrixBase<Derived>& prices) {
  using Scalar = typename Derived::Scalar;
  detail::require_length(prices, 2);
  detail::require_finite(prices);
  for (Eigen::Index i = 0; i < prices.size(); ++i) {
    if (!(prices(i) > Scalar(0))) {
      throw DomainError("nonpositive price at index " + std::to_string(i));
    }
  }
  const Eigen::Index n = prices.size();
  SeriesX<Scalar> logs = prices.array().log().matrix();
  return logs.tail(n - 1) - logs.head(n - 1);
}

template <typename Derived>
SeriesX<typename Derived::Scalar> absolute_transform(const Eigen::MatrixBase<Derived>& series) {
  detail::require_finite(series);
  return series.cwiseAbs();
}

/// Maximum-likelihood mean and variance (divisor n) under constant mean and
/// variance. A constant series yields exactly (value, 0).
template <typename Derived>
NullEstimatesX<typename Derived::Scalar> null_estimates(const Eigen::MatrixBase<Derived>& series) {
  using Scalar = typename Derived::Scalar;
  detail::require_length(series, 2);
  detail::require_finite(series);
  const Eigen::Index n = series.size();
  if (series.minCoeff() == series.maxCoeff()) {
    return {series(0), Scalar(0)};
  }
  CompensatedSum<Scalar> total;
  for (Eigen::Index t = 0; t < n; ++t) total.add(series(t));
  const Scalar mu = total.value() / Scalar(n);
  CompensatedSum<Scalar> squares;
  for (Eigen::Index t = 0; t < n; ++t) {
    const Scalar d = series(t) - mu;
    squares.add(d * d);
  }
  return {mu, squares.value() / Scalar(n)};
}

/// B_n(k/n) for k = 0..n. Partial sums of the centred data are accumulated
/// with compensation and the residual drift k/n * P_n is removed, so both
/// endpoints are exactly zero.
template <typename Derived>
CusumPathX<typename Derived::Scalar> cusum_path(const Eigen::MatrixBase<Derived>& series) {
  using Scalar = typename Derived::Scalar;
  const auto est = null_estimates(series);
  if (!(est.sigma2_hat > Scalar(0))) {
    throw DegenerateSeries("zero sample variance: the CUSUM statistic is undefined");
  }
  const Eigen::Index n = series.size();
  SeriesX<Scalar> partial(n + 1);
  partial(0) = Scalar(0);
  CompensatedSum<Scalar> acc;
  for (Eigen::Index t = 0; t < n; ++t) {
    acc.add(series(t) - est.mu_hat);
    partial(t + 1) = acc.value();
  }
  const Scalar sigma = std::sqrt(est.sigma2_hat);
  const Scalar norm = Scalar(1) / (std::sqrt(Scalar(n)) * sigma);
  const Scalar residual = partial(n);
  SeriesX<Scalar> points(n + 1);
  for (Eigen::Index k = 0; k <= n; ++k) {
    const Scalar drift = (Scalar(k) / Scalar(n)) * residual;
    points(k) = (partial(k) - drift) * norm;
  }
  return {std::move(points), sigma};
}

/// Sup-statistic max_k |B_n(k/n)| with its p-value under the Brownian-bridge
/// limit. The break index is the smallest maximising k.
template <typename Derived>
TestOutcome lm_test(const Eigen::MatrixBase<Derived>& series, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("significance level must lie in (0,1)");
  }
  const auto path = cusum_path(series);
  Eigen::Index arg = 0;
  double stat = 0.0;
  for (Eigen::Index k = 0; k < path.points.size(); ++k) {
    const double v = static_cast<double>(std::abs(path.points(k)));
    if (v > stat) {
      stat = v;
      arg = k;
    }
  }
  TestOutcome out;
  out.statistic = stat;
  out.break_index = arg;
  out.p_value = p_value(stat);
  out.reject = out.p_value < alpha;
  return out;
}

}  // namespace lmbreak
