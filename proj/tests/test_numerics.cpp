#include "doctest.h"

#include <cmath>
#include <limits>

#include "hillspec/errors.hpp"
#include "hillspec/numerics.hpp"

using namespace hillspec;

TEST_CASE("not-a-knot spline reproduces cubic polynomials exactly") {
  auto p = [](double x) { return ((2.0 * x - 1.0) * x + 3.0) * x - 5.0; };
  auto dp = [](double x) { return (6.0 * x - 2.0) * x + 3.0; };
  const double x0 = -1.0, h = 0.25;
  const std::size_t n = 13;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = p(x0 + h * double(i));
  const CubicSpline s(x0, h, y, CubicSpline::Boundary::NotAKnot);

  for (int k = 0; k <= 60; ++k) {
    const double x = x0 + (h * double(n - 1)) * double(k) / 60.0;
    CHECK(std::fabs(s.eval(x) - p(x)) <= 1e-12);
    CHECK(std::fabs(s.deriv(x) - dp(x)) <= 1e-10);
  }
}

TEST_CASE("periodic spline wraps and converges at fourth order") {
  const double pi = std::acos(-1.0);
  const std::size_t n = 64;
  const double h = 2.0 * pi / double(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(h * double(i));
  const CubicSpline s(0.0, h, y, CubicSpline::Boundary::Periodic);

  double sup = 0.0;
  for (int k = 0; k < 257; ++k) {
    const double x = 2.0 * pi * double(k) / 257.0;
    sup = std::max(sup, std::fabs(s.eval(x) - std::sin(x)));
    // wraparound: shifting by the period must not change the value
    CHECK(std::fabs(s.eval(x + 2.0 * pi) - s.eval(x)) <= 1e-12);
    CHECK(std::fabs(s.eval(x - 6.0 * pi) - s.eval(x)) <= 1e-12);
  }
  CHECK(sup <= 1e-6);  // (2pi/64)^4 ~ 9e-8 with a modest constant
}

TEST_CASE("spline rejects degenerate input") {
  CHECK_THROWS_AS(CubicSpline(0.0, 0.0, {1.0, 2.0, 3.0, 4.0},
                              CubicSpline::Boundary::NotAKnot),
                  DomainError);
  CHECK_THROWS_AS(
      CubicSpline(0.0, 1.0, {1.0, 2.0}, CubicSpline::Boundary::NotAKnot),
      DomainError);
  CHECK_THROWS_AS(
      CubicSpline(0.0, 1.0, {1.0, 2.0}, CubicSpline::Boundary::Periodic),
      DomainError);
}

TEST_CASE("simpson handles even and odd panel counts") {
  // cubic is exact under plain Simpson (odd sample count)
  {
    const std::size_t n = 11;
    const double h = 1.0 / double(n - 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = h * double(i);
      y[i] = x * x * x;
    }
    CHECK(std::fabs(simpson(y, h) - 0.25) <= 1e-14);
  }
  // even panel count routes one panel through the 3/8 rule
  {
    const double pi = std::acos(-1.0);
    const std::size_t n = 102;
    const double h = pi / double(n - 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(h * double(i));
    CHECK(std::fabs(simpson(y, h) - 2.0) <= 1e-6);
  }
  CHECK_THROWS_AS(simpson({1.0, 2.0}, 0.1), DomainError);
}

TEST_CASE("median of odd, even and empty sequences") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(median({7.0}) == 7.0);
  CHECK_THROWS_AS(median(std::vector<double>{}), DomainError);
}

TEST_CASE("bisection finds a bracketed root and rejects a non-bracket") {
  auto f = [](double x) { return std::cos(x); };
  const double pi = std::acos(-1.0);
  const double r = bisect(f, 1.0, 2.0, f(1.0), f(2.0), 1e-13);
  CHECK(std::fabs(r - 0.5 * pi) <= 1e-12);
  CHECK_THROWS_AS(bisect(f, 0.0, 1.0, f(0.0), f(1.0), 1e-13), DomainError);
}

TEST_CASE("decay fit cancels periodic modulation exactly on aligned grids") {
  // |y| = e^{-0.7 z} (2 + cos(2 pi z / 1.5)); the period 1.5 is an exact
  // multiple of h so the strided pair lands on a node.
  const double r = 0.7, per = 1.5, h = 0.01;
  const std::size_t n = 2001;  // z in [0, 20]
  std::vector<double> y(n);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = h * double(i);
    y[i] = std::exp(-r * z) * (2.0 + std::cos(2.0 * pi * z / per));
  }
  CHECK(std::fabs(fit_decay_rate(0.0, h, y, 2.0, 18.0, per) - r) <= 1e-10);
}

TEST_CASE("decay fit tolerates off-grid periods via interpolation") {
  const double r = 0.35, per = std::sqrt(2.0), h = 0.01;
  const std::size_t n = 2001;
  std::vector<double> y(n);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = h * double(i);
    y[i] = std::exp(-r * z) * (2.0 + std::sin(2.0 * pi * z / per));
  }
  CHECK(std::fabs(fit_decay_rate(0.0, h, y, 2.0, 18.0, per) - r) <= 1e-5);
}

TEST_CASE("decay fit needs enough period-strided pairs") {
  std::vector<double> y(2001, 1.0);
  // window shorter than one period: no admissible pair
  CHECK_THROWS_AS(fit_decay_rate(0.0, 0.01, y, 3.0, 3.5, 1.0), DomainError);
}

TEST_CASE("interval union merges overlaps and near-touches") {
  const double inf = std::numeric_limits<double>::infinity();
  auto merged = merge_intervals(
      {{3.0, 4.0}, {0.0, 1.0}, {0.5, 2.0}, {2.0 + 1e-12, 2.5}, {5.0, inf}},
      1e-10);
  REQUIRE(merged.size() == 3);
  CHECK(merged[0].lo == 0.0);
  CHECK(merged[0].hi == 2.5);  // 1e-12 gap is below the tolerance
  CHECK(merged[1].lo == 3.0);
  CHECK(merged[1].hi == 4.0);
  CHECK(merged[2].lo == 5.0);
  CHECK(std::isinf(merged[2].hi));
  CHECK(merge_intervals({}, 1e-10).empty());
}
