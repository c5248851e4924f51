#include "lmbreak/signals.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lmbreak/errors.hpp"
#include "lmbreak/quadrature.hpp"

namespace lmbreak {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_fractions(const std::vector<double>& fractions, const char* what) {
  double prev = 0.0;
  for (double f : fractions) {
    if (!(f > prev && f < 1.0)) {
      throw SpecError(std::string(what) + " must be strictly increasing in (0,1)");
    }
    prev = f;
  }
}

void require_finite_levels(const std::vector<double>& levels) {
  for (double v : levels) {
    if (!std::isfinite(v)) throw SpecError("levels must be finite");
  }
}

void require_positive_levels(const std::vector<double>& levels) {
  for (double v : levels) {
    if (!(v > 0.0) || !std::isfinite(v)) throw SpecError("volatility levels must be positive");
  }
}

// [lambda * n] with floor. The guard absorbs representation error so that
// fractions such as 2/3 land on the exact integer when n is a multiple of 3.
Eigen::Index boundary(double lambda, Eigen::Index n) {
  const double x = lambda * static_cast<double>(n);
  return static_cast<Eigen::Index>(std::floor(x * (1.0 + 1e-12) + 1e-9));
}

Series step_path(const std::vector<double>& levels, const std::vector<double>& fractions,
                 Eigen::Index n) {
  Series out(n);
  Eigen::Index start = 0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const Eigen::Index stop =
        j < fractions.size() ? std::min(boundary(fractions[j], n), n) : n;
    for (Eigen::Index t = start; t < stop; ++t) out(t) = levels[j];
    start = std::max(start, stop);
  }
  return out;
}

double multi_regime_value(const MultiRegimeSigma& s, double x) {
  double v = s.levels[0];
  for (std::size_t j = 0; j < s.locations.size(); ++j) {
    const double z = (x - s.locations[j]) / s.scales[j];
    v += (s.levels[j + 1] - s.levels[j]) * standard_transition(s.families[j], z);
  }
  return v;
}

void require_n(Eigen::Index n) {
  if (n < 1) throw SpecError("path length must be positive");
}

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Uniform on (0,1): 53 random bits, offset by half an ulp so 0 is excluded.
double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void TransitionSpec::validate() const {
  if (!(tau1 > 0.0 && tau1 < 1.0)) throw SpecError("transition location must lie in (0,1)");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw SpecError("transition slope must be positive");
}

double standard_transition(TransitionFamily family, double z) {
  if (family == TransitionFamily::logistic) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  }
  return -std::expm1(-z * z);
}

double transition(const TransitionSpec& spec, double x) {
  const double d = x - spec.tau1;
  if (spec.family == TransitionFamily::logistic) {
    return standard_transition(spec.family, spec.gamma * d);
  }
  return -std::expm1(-spec.gamma * d * d);
}

void validate(const MeanSpec& spec) {
  std::visit(overloaded{
                 [](const ConstantMean& m) {
                   if (!std::isfinite(m.level)) throw SpecError("mean level must be finite");
                 },
                 [](const StepMean& m) {
                   if (m.levels.size() != m.fractions.size() + 1) {
                     throw SpecError("step mean needs one more level than fractions");
                   }
                   require_fractions(m.fractions, "mean break fractions");
                   require_finite_levels(m.levels);
                 },
                 [](const SmoothMean& m) {
                   if (!std::isfinite(m.from) || !std::isfinite(m.to)) {
                     throw SpecError("mean levels must be finite");
                   }
                   m.transition.validate();
                 },
             },
             spec);
}

void validate(const SigmaSpec& spec) {
  std::visit(overloaded{
                 [](const ConstantSigma& s) { require_positive_levels({s.level}); },
                 [](const StepSigma& s) {
                   if (s.levels.size() != s.fractions.size() + 1) {
                     throw SpecError("step sigma needs one more level than fractions");
                   }
                   require_fractions(s.fractions, "variance break fractions");
                   require_positive_levels(s.levels);
                 },
                 [](const SmoothSigma& s) {
                   require_positive_levels({s.from, s.to});
                   s.transition.validate();
                 },
                 [](const MultiRegimeSigma& s) {
                   const std::size_t m = s.locations.size();
                   if (m == 0) throw SpecError("multi-regime sigma needs at least one transition");
                   if (s.levels.size() != m + 1 || s.scales.size() != m || s.families.size() != m) {
                     throw SpecError("multi-regime sigma needs m+1 levels and m locations, scales, families");
                   }
                   require_fractions(s.locations, "transition locations");
                   require_positive_levels(s.levels);
                   for (double sc : s.scales) {
                     if (!(sc > 0.0)) throw SpecError("transition scales must be positive");
                   }
                 },
             },
             spec);
}

Series mean_path(const MeanSpec& spec, Eigen::Index n) {
  require_n(n);
  validate(spec);
  return std::visit(overloaded{
                        [n](const ConstantMean& m) -> Series { return Series::Constant(n, m.level); },
                        [n](const StepMean& m) { return step_path(m.levels, m.fractions, n); },
                        [n](const SmoothMean& m) {
                          Series out(n);
                          for (Eigen::Index t = 1; t <= n; ++t) {
                            const double x = static_cast<double>(t) / static_cast<double>(n);
                            out(t - 1) = m.from + (m.to - m.from) * transition(m.transition, x);
                          }
                          return out;
                        },
                    },
                    spec);
}

double sigma_at(const SigmaSpec& spec, double x) {
  return std::visit(overloaded{
                        [](const ConstantSigma& s) { return s.level; },
                        [x](const StepSigma& s) {
                          std::size_t j = 0;
                          while (j < s.fractions.size() && x > s.fractions[j]) ++j;
                          return s.levels[j];
                        },
                        [x](const SmoothSigma& s) {
                          return s.from + (s.to - s.from) * transition(s.transition, x);
                        },
                        [x](const MultiRegimeSigma& s) { return multi_regime_value(s, x); },
                    },
                    spec);
}

Series sigma_path(const SigmaSpec& spec, Eigen::Index n) {
  require_n(n);
  validate(spec);
  Series out;
  if (const auto* step = std::get_if<StepSigma>(&spec)) {
    out = step_path(step->levels, step->fractions, n);
  } else {
    out.resize(n);
    for (Eigen::Index t = 1; t <= n; ++t) {
      out(t - 1) = sigma_at(spec, static_cast<double>(t) / static_cast<double>(n));
    }
  }
  if (!(out.minCoeff() > 0.0)) throw SpecError("volatility path is not strictly positive");
  return out;
}

namespace {

void add_cuts(std::vector<double>& out, double location, double width) {
  out.push_back(location);
  for (double k : {1.0, 4.0, 16.0, 64.0}) {
    out.push_back(location - k * width);
    out.push_back(location + k * width);
  }
}

}  // namespace

std::vector<double> transition_breakpoints(const TransitionSpec& spec) {
  std::vector<double> out;
  add_cuts(out, spec.tau1,
           spec.family == TransitionFamily::logistic ? 1.0 / spec.gamma : 1.0 / std::sqrt(spec.gamma));
  return out;
}

std::vector<double> sigma_breakpoints(const SigmaSpec& spec) {
  std::vector<double> out;
  if (const auto* st = std::get_if<StepSigma>(&spec)) out = st->fractions;
  if (const auto* sm = std::get_if<SmoothSigma>(&spec)) out = transition_breakpoints(sm->transition);
  if (const auto* mr = std::get_if<MultiRegimeSigma>(&spec)) {
    for (std::size_t j = 0; j < mr->locations.size(); ++j) add_cuts(out, mr->locations[j], mr->scales[j]);
  }
  return out;
}

double ergodic_variance_limit(const SigmaSpec& spec) {
  validate(spec);
  if (const auto* c = std::get_if<ConstantSigma>(&spec)) return c->level * c->level;
  if (const auto* s = std::get_if<StepSigma>(&spec)) {
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < s->levels.size(); ++j) {
      const double next = j < s->fractions.size() ? s->fractions[j] : 1.0;
      total += (next - prev) * s->levels[j] * s->levels[j];
      prev = next;
    }
    return total;
  }
  const auto breaks = sigma_breakpoints(spec);
  const auto r = integrate(
      [&spec](double x) {
        const double v = sigma_at(spec, x);
        return v * v;
      },
      0.0, 1.0, 1e-10, breaks);
  return r.value;
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = splitmix64(h + kGolden + splitmix64(w));
  return h;
}

double gaussian_at(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed);
  const std::uint64_t pair = index >> 1;
  const double u1 = unit_open(splitmix64(key + (2 * pair + 1) * kGolden));
  const double u2 = unit_open(splitmix64(key + (2 * pair + 2) * kGolden));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index & 1U) ? radius * std::sin(angle) : radius * std::cos(angle);
}

Series gaussian_stream(std::uint64_t seed, Eigen::Index count) {
  // Pairwise form of gaussian_at: identical operations, one log per pair.
  Series out(count);
  const std::uint64_t key = splitmix64(seed);
  for (Eigen::Index i = 0; i < count; i += 2) {
    const std::uint64_t pair = static_cast<std::uint64_t>(i) >> 1;
    const double u1 = unit_open(splitmix64(key + (2 * pair + 1) * kGolden));
    const double u2 = unit_open(splitmix64(key + (2 * pair + 2) * kGolden));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out(i) = radius * std::cos(angle);
    if (i + 1 < count) out(i + 1) = radius * std::sin(angle);
  }
  return out;
}

Series generate_series(const MeanSpec& mean, const SigmaSpec& sigma, Eigen::Index n,
                       std::uint64_t seed) {
  return SeriesGenerator(mean, sigma, n).draw(seed);
}

SeriesGenerator::SeriesGenerator(const MeanSpec& mean, const SigmaSpec& sigma, Eigen::Index n)
    : mean_(mean_path(mean, n)), sigma_(sigma_path(sigma, n)) {}

Series SeriesGenerator::draw_noise(std::uint64_t seed) const {
  return sigma_.cwiseProduct(gaussian_stream(seed, sigma_.size()));
}

Series SeriesGenerator::draw(std::uint64_t seed) const { return mean_ + draw_noise(seed); }

}  // namespace lmbreak
