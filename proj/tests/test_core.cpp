#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lmbreak/core.hpp"
#include "lmbreak/signals.hpp"
#include "oracles.hpp"

using namespace lmbreak;

namespace {

Series vec(std::initializer_list<double> v) {
  Series s(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s(i++) = x;
  return s;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("compute_returns examples") {
    CHECK(compute_returns(vec({1, 1, 1})) == vec({0, 0}));
    const Series e = compute_returns(vec({1, std::numbers::e}));
    REQUIRE(e.size() == 1);
    CHECK(e(0) == doctest::Approx(1.0).epsilon(1e-15));
    const Series r = compute_returns(vec({100, 101, 99}));
    CHECK(r(0) == doctest::Approx(0.00995033085316808).epsilon(1e-14));
    CHECK(r(1) == doctest::Approx(-0.0200006667066695).epsilon(1e-14));
  }

  TEST_CASE("compute_returns rejects nonpositive prices by index") {
    try {
      compute_returns(vec({1.0, 2.0, 0.0, 3.0}));
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("index 2") != std::string::npos);
    }
    CHECK_THROWS_AS(compute_returns(vec({-1.0, 2.0})), DomainError);
    CHECK_THROWS_AS(compute_returns(vec({1.0})), InsufficientData);
  }

  TEST_CASE("absolute_transform examples") {
    CHECK(absolute_transform(vec({-1, 2, 0})) == vec({1, 2, 0}));
    CHECK(absolute_transform(vec({0.5})) == vec({0.5}));
    CHECK(absolute_transform(vec({-0.02, 0.01})) == vec({0.02, 0.01}));
    CHECK_THROWS_AS(absolute_transform(vec({1.0, NAN})), DomainError);
  }

  TEST_CASE("null_estimates examples") {
    auto a = null_estimates(vec({1, 1, 1, 1}));
    CHECK(a.mu_hat == 1.0);
    CHECK(a.sigma2_hat == 0.0);
    auto b = null_estimates(vec({-1, 1}));
    CHECK(b.mu_hat == 0.0);
    CHECK(b.sigma2_hat == 1.0);
    auto c = null_estimates(vec({0, 1, 2, 3}));
    CHECK(c.mu_hat == 1.5);
    CHECK(c.sigma2_hat == 1.25);
    CHECK_THROWS_AS(null_estimates(vec({3.0})), InsufficientData);
    CHECK_THROWS_AS(null_estimates(vec({1.0, INFINITY})), DomainError);
  }

  TEST_CASE("zero variance exactly for constant series, including inexact constants") {
    for (double c : {0.1, 1.0 / 3.0, -7.25e8, 1e-300}) {
      const auto est = null_estimates(Series::Constant(7, c));
      CHECK(est.sigma2_hat == 0.0);
      CHECK(est.mu_hat == c);
    }
  }

  TEST_CASE("cusum_path examples") {
    const auto p = cusum_path(vec({-1, 1}));
    REQUIRE(p.points.size() == 3);
    CHECK(p.points(0) == 0.0);
    CHECK(p.points(1) == doctest::Approx(-0.70710678118654752).epsilon(1e-15));
    CHECK(p.points(2) == 0.0);

    const auto q = cusum_path(vec({0, 0, 3, 3}));
    CHECK(q.scale == 1.5);
    const std::vector<double> expected{0, -0.5, -1.0, -0.5, 0};
    for (std::size_t k = 0; k < expected.size(); ++k) {
      CHECK(q.points(static_cast<Eigen::Index>(k)) == doctest::Approx(expected[k]).epsilon(1e-15));
    }
    CHECK_THROWS_AS(cusum_path(Series::Constant(5, 2.0)), DegenerateSeries);
  }

  TEST_CASE("lm_test examples") {
    const auto a = lm_test(vec({0, 0, 3, 3}), 0.05);
    CHECK(a.statistic == doctest::Approx(1.0).epsilon(1e-15));
    // 1 - F(1) = 2 sum (-1)^(k+1) exp(-2k^2), high-precision value.
    CHECK(a.p_value == doctest::Approx(0.2699996716773545).epsilon(1e-12));
    CHECK(a.break_index == 2);
    CHECK_FALSE(a.reject);

    const auto b = lm_test(vec({-1, 1}), 0.05);
    CHECK(b.statistic == doctest::Approx(0.70710678118654752).epsilon(1e-15));
    CHECK(b.break_index == 1);

    CHECK_THROWS_AS(lm_test(Series::Constant(4, 1.0), 0.05), DegenerateSeries);
    CHECK_THROWS_AS(lm_test(vec({0, 1}), 0.0), DomainError);
    CHECK_THROWS_AS(lm_test(vec({0, 1}), 1.0), DomainError);
  }

  TEST_CASE("break index is the smallest maximiser") {
    // |B| equals 1/sqrt(2) at k = 1 and k = 3.
    const auto r = lm_test(vec({1, -1, 1, -1}), 0.05);
    CHECK(r.break_index == 1);
  }

  TEST_CASE("statistic matches a brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto n = static_cast<Eigen::Index>(5 + 13 * seed);
      Series y = gaussian_stream(seed, n);
      y.tail(n / 3).array() += 0.4 * static_cast<double>(seed % 4);
      const std::vector<double> v(y.data(), y.data() + y.size());
      CHECK(lm_test(y, 0.05).statistic == doctest::Approx(oracle::cusum_statistic(v)).epsilon(1e-12));
    }
  }

  TEST_CASE("works on float data and lazy expressions") {
    Eigen::VectorXf f(4);
    f << 0.f, 0.f, 3.f, 3.f;
    const auto path = cusum_path(f);
    CHECK(path.points(2) == doctest::Approx(-1.0f));
    const Series y = vec({-2, 1, -3, 4, -1});
    const auto via_expr = lm_test(y.cwiseAbs(), 0.05);
    const auto via_copy = lm_test(absolute_transform(y), 0.05);
    CHECK(via_expr.statistic == via_copy.statistic);
  }

  TEST_CASE("property: shift and scale invariance") {
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
      const Series y = gaussian_stream(seed, 60 + static_cast<Eigen::Index>(seed % 40));
      const double a = 10.0 * gaussian_at(seed, 1000);
      double b = 3.0 * gaussian_at(seed, 1001);
      if (std::abs(b) < 1e-3) b = 1.0;
      const Series z = (b * y).array() + a;
      const auto r0 = lm_test(y, 0.05);
      const auto r1 = lm_test(z, 0.05);
      CHECK(r1.statistic == doctest::Approx(r0.statistic).epsilon(1e-10));
      CHECK(r1.p_value == doctest::Approx(r0.p_value).epsilon(1e-9));
      CHECK(r1.break_index == r0.break_index);
    }
  }

  TEST_CASE("property: time reversal leaves the statistic unchanged") {
    for (std::uint64_t seed = 200; seed < 240; ++seed) {
      Series y = gaussian_stream(seed, 77);
      y.head(30).array() += 1.0;
      const Series rev = y.reverse();
      CHECK(lm_test(rev, 0.05).statistic == doctest::Approx(lm_test(y, 0.05).statistic).epsilon(1e-12));
    }
  }

  TEST_CASE("property: endpoints exactly zero up to n = 1e6") {
    for (Eigen::Index n : {Eigen::Index{10}, Eigen::Index{1000}, Eigen::Index{1000000}}) {
      const Series y = (gaussian_stream(42, n).array() * 1e-3 + 12345.678).matrix();
      const auto p = cusum_path(y);
      CHECK(p.points(0) == 0.0);
      CHECK(p.points(n) == 0.0);
      CHECK(p.points.allFinite());
    }
  }

  TEST_CASE("property: appending a shifted copy never decreases the statistic") {
    for (std::uint64_t seed = 300; seed < 400; ++seed) {
      const Series y = gaussian_stream(seed, 200);
      Series z(400);
      z << y, (y.array() + 2.0).matrix();
      CHECK(lm_test(z, 0.05).statistic >= lm_test(y, 0.05).statistic);
    }
  }
}
