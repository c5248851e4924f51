#pragma once

// Deterministic mean and volatility paths mu_t, sigma_t (constant, abrupt
// step, smooth transition, multi-regime), a counter-based Gaussian source and
// series synthesis y_t = mu_t + sigma_t * eps_t.
//
// Time is indexed t = 1..n and mapped to x = t/n; integer-part boundaries use
// floor, so regime j of a step path covers t = [lambda_{j-1} n] + 1 .. [lambda_j n].

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <variant>
#include <vector>

#include "lmbreak/core.hpp"

namespace lmbreak {

enum class TransitionFamily { logistic, exponential };

struct TransitionSpec {
  TransitionFamily family = TransitionFamily::logistic;
  double tau1 = 0.5;   // location, in (0,1)
  double gamma = 1.0;  // slope, > 0

  void validate() const;
};

/// logistic: 1 / (1 + exp(-gamma (x - tau1)));  exponential: 1 - exp(-gamma (x - tau1)^2).
double transition(const TransitionSpec& spec, double x);

/// Family evaluated at a standardized argument (location 0, slope 1).
double standard_transition(TransitionFamily family, double z);

struct ConstantMean {
  double level = 0.0;
};
struct StepMean {
  std::vector<double> levels;     // one more than fractions
  std::vector<double> fractions;  // strictly increasing in (0,1)
};
struct SmoothMean {
  double from = 0.0;
  double to = 0.0;
  TransitionSpec transition;
};
using MeanSpec = std::variant<ConstantMean, StepMean, SmoothMean>;

struct ConstantSigma {
  double level = 1.0;
};
struct StepSigma {
  std::vector<double> levels;
  std::vector<double> fractions;
};
struct SmoothSigma {
  double from = 1.0;
  double to = 1.0;
  TransitionSpec transition;
};
/// sigma(x) = levels[0] + sum_j (levels[j+1] - levels[j]) F_j((x - locations[j]) / scales[j]).
/// When every other transition is saturated this is the two-level blend
/// levels[j] (1 - F_j) + levels[j+1] F_j of regime j.
struct MultiRegimeSigma {
  std::vector<double> levels;     // m + 1 positive levels
  std::vector<double> locations;  // m, strictly increasing in (0,1)
  std::vector<double> scales;     // m, positive
  std::vector<TransitionFamily> families;  // m
};
using SigmaSpec = std::variant<ConstantSigma, StepSigma, SmoothSigma, MultiRegimeSigma>;

/// Throw SpecError on violated invariants.
void validate(const MeanSpec& spec);
void validate(const SigmaSpec& spec);

Series mean_path(const MeanSpec& spec, Eigen::Index n);
Series sigma_path(const SigmaSpec& spec, Eigen::Index n);

/// Continuous-time volatility sigma(x), x in [0,1]; a step path takes
/// the earlier level at a break point, matching t <= [tau n].
double sigma_at(const SigmaSpec& spec, double x);

/// Quadrature cut points for a transition: its location plus points a few
/// widths either side (width 1/gamma for logistic, 1/sqrt(gamma) for
/// exponential), so steep transitions cannot fall between Kronrod nodes.
std::vector<double> transition_breakpoints(const TransitionSpec& spec);
/// Same for a volatility profile: step fractions, or the cut points of every
/// transition it contains.
std::vector<double> sigma_breakpoints(const SigmaSpec& spec);

/// lim (1/n) sum sigma_t^2: exact for constant and step paths, adaptive
/// quadrature (absolute tolerance 1e-10) of sigma(x)^2 otherwise.
double ergodic_variance_limit(const SigmaSpec& spec);

/// Mixes a list of words into one 64-bit seed (SplitMix64 finalizer chain).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words);

/// Standard normal variate number `index` of the stream `seed`. Pure function
/// of (seed, index): Box-Muller on a SplitMix64 counter hash, cosine branch
/// for even indices and sine branch for odd ones.
double gaussian_at(std::uint64_t seed, std::uint64_t index);
Series gaussian_stream(std::uint64_t seed, Eigen::Index count);

Series generate_series(const MeanSpec& mean, const SigmaSpec& sigma, Eigen::Index n,
                       std::uint64_t seed);

/// Caches mu_t and sigma_t for repeated draws at a fixed n.
class SeriesGenerator {
 public:
  SeriesGenerator(const MeanSpec& mean, const SigmaSpec& sigma, Eigen::Index n);

  Series draw(std::uint64_t seed) const;
  /// sigma_t * eps_t only (the mean removed), as used by W_n.
  Series draw_noise(std::uint64_t seed) const;

  const Series& mean() const { return mean_; }
  const Series& sigma() const { return sigma_; }
  Eigen::Index size() const { return mean_.size(); }

 private:
  Series mean_;
  Series sigma_;
};

}  // namespace lmbreak
