#pragma once

#include <functional>
#include <span>

namespace lmbreak {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// `breakpoints` are interior points where the integrand changes character
/// (the location of a steep transition, say); the initial partition is split
/// there so the adaptive refinement starts on the right scale. Points outside
/// (a, b) are ignored. Subdivision stops when the summed error estimate drops
/// below `abs_tol` or `max_intervals` is reached, in which case `converged` is
/// false and the best estimate is still returned.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-10, std::span<const double> breakpoints = {},
                           int max_intervals = 2000);

}  // namespace lmbreak
