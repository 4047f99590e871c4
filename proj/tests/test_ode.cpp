#include "doctest.h"

#include <cmath>

#include "hillspec/errors.hpp"
#include "hillspec/ode.hpp"
#include "hillspec/potentials.hpp"

using namespace hillspec;

namespace {

// Q = (m + A)^2 - lambda with A = 0, so Q is the constant -lambda + m^2.
ModeCoefficient const_coeff(double Q) {
  return ModeCoefficient(0, PeriodicPotential::constant(0.0), -Q);
}

}  // namespace

TEST_CASE("constant Q = 1: exponential solution") {
  const Trajectory t = propagate(const_coeff(1.0), 0.0, 1.0, {1.0, 1.0}, 1e-3);
  const double e = std::exp(1.0);
  CHECK(std::fabs(t.end_state().v - e) <= 1e-9);
  CHECK(std::fabs(t.end_state().vp - e) <= 1e-9);
  CHECK(t.error_estimate() <= 1e-10);
}

TEST_CASE("constant Q = -4: trigonometric solution over a full turn") {
  const double pi = std::acos(-1.0);
  const Trajectory t =
      propagate(const_coeff(-4.0), 0.0, pi, {1.0, 0.0}, 1e-3);
  CHECK(std::fabs(t.end_state().v - 1.0) <= 1e-9);   // cos(2 pi)
  CHECK(std::fabs(t.end_state().vp - 0.0) <= 1e-9);  // -2 sin(2 pi)
}

TEST_CASE("backward integration produces an ascending grid") {
  const Trajectory t = propagate(const_coeff(1.0), 1.0, 0.0, {std::exp(1.0),
                                 std::exp(1.0)}, 1e-3);
  CHECK(t.z_front() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(t.z_back() == doctest::Approx(1.0).epsilon(1e-15));
  // initial data was given at z = 1, so the *end* of the grid carries it
  CHECK(std::fabs(t.end_state().v - std::exp(1.0)) <= 1e-12);
  // and z = 0 holds the analytically propagated value
  CHECK(std::fabs(t.start_state().v - 1.0) <= 1e-9);
  CHECK(std::fabs(t.start_state().vp - 1.0) <= 1e-9);
}

TEST_CASE("forward then backward recovers the initial state") {
  const ModeCoefficient q(1, PeriodicPotential::cosine(), 0.5);
  const Trajectory fwd = propagate(q, 0.0, 5.0, {1.0, -0.3}, 2e-3);
  const Trajectory bwd = propagate(q, 5.0, 0.0, fwd.end_state(), 2e-3);
  CHECK(std::fabs(bwd.start_state().v - 1.0) <= 1e-8);
  CHECK(std::fabs(bwd.start_state().vp + 0.3) <= 1e-8);
}

TEST_CASE("half-step error estimate shrinks at fifth order") {
  const ModeCoefficient q(1, PeriodicPotential::cosine(), 0.5);
  // compare where truncation still dominates; below h ~ 0.008 the estimate
  // sits on the round-off floor and the ratio is meaningless
  const double e_coarse =
      propagate(q, 0.0, 5.0, {1.0, 0.0}, 0.032).error_estimate();
  const double e_fine =
      propagate(q, 0.0, 5.0, {1.0, 0.0}, 0.016).error_estimate();
  REQUIRE(e_fine > 0.0);
  CHECK(e_coarse / e_fine >= 12.0);  // a fifth-order pair contracts ~32x
  CHECK(e_fine <= 1e-9);
  CHECK(propagate(q, 0.0, 5.0, {1.0, 0.0}, 2e-3).error_estimate() <= 1e-10);
}

TEST_CASE("dense output tracks cosh between nodes") {
  const Trajectory t = propagate(const_coeff(1.0), 0.0, 1.0, {1.0, 0.0}, 1e-2);
  for (int k = 0; k < 97; ++k) {
    const double z = double(k) / 96.0;
    CHECK(std::fabs(t.value(z) - std::cosh(z)) <= 1e-10);
    CHECK(std::fabs(t.deriv(z) - std::sinh(z)) <= 1e-8);
    CHECK(std::fabs(t.second_deriv(z) - std::cosh(z)) <= 1e-6);
  }
}

TEST_CASE("interpolant residual sits near the truncation floor on exact data") {
  // Analytic node data for v = cosh z, so the only defect is interpolation.
  const double h = 0.01;
  const std::size_t n = 101;
  std::vector<double> z(n), v(n), vp(n), vpp(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = h * double(i);
    v[i] = std::cosh(z[i]);
    vp[i] = std::sinh(z[i]);
    vpp[i] = std::cosh(z[i]);
  }
  const Trajectory t = Trajectory::from_nodes(z, v, vp, vpp);
  const ModeCoefficient q = const_coeff(1.0);
  double sup = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double x = 1.0 * double(k) / 499.0;
    sup = std::max(sup, residual_at(t, q, x));
  }
  CHECK(sup <= 1e-10);
}

TEST_CASE("midpoint residual decays at fourth order in the step") {
  const ModeCoefficient q(1, PeriodicPotential::cosine(), 0.5);
  auto max_resid = [&](double h) {
    const Trajectory t = propagate(q, 0.0, 2.0, {1.0, 0.0}, h);
    double sup = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
      sup = std::max(sup,
                     residual_at(t, q, 0.5 * (t.z_at(i) + t.z_at(i + 1))));
    return sup;
  };
  const double r1 = max_resid(0.1), r2 = max_resid(0.05);
  const double ratio = r1 / r2;
  CHECK(ratio >= 10.0);
  CHECK(ratio <= 30.0);
}

TEST_CASE("fundamental matrix keeps unit Wronskian") {
  const double pi = std::acos(-1.0);
  const ModeCoefficient q(1, PeriodicPotential::cosine(), 0.5);
  for (double L : {pi, 2.0 * pi, 10.0}) {
    const Matrix2 M = propagate_fundamental(q, 0.0, L, 1e-3);
    CHECK(std::fabs(M.det() - 1.0) <= 1e-9);
  }
}

TEST_CASE("trajectory merge joins at the shared node") {
  const ModeCoefficient q(1, PeriodicPotential::cosine(), 0.5);
  const Trajectory right = propagate(q, 0.0, 2.0, {1.0, 0.2}, 1e-2);
  const Trajectory left = propagate(q, 0.0, -2.0, {1.0, 0.2}, 1e-2);
  const Trajectory whole = Trajectory::merge(left, right);
  CHECK(whole.size() == left.size() + right.size() - 1);
  CHECK(whole.z_front() == doctest::Approx(-2.0));
  CHECK(whole.z_back() == doctest::Approx(2.0));
  CHECK(std::fabs(whole.value(0.0) - 1.0) <= 1e-12);
  // mismatched seams are rejected
  CHECK_THROWS_AS(Trajectory::merge(right, right), DomainError);
}

TEST_CASE("step-size preconditions") {
  const ModeCoefficient q = const_coeff(1.0);
  CHECK_THROWS_AS(propagate(q, 0.0, 1.0, {1.0, 0.0}, 0.2), DomainError);
  CHECK_THROWS_AS(propagate(q, 0.0, 1.0, {1.0, 0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(propagate(q, 0.0, 0.0, {1.0, 0.0}, 1e-3), DomainError);
}

TEST_CASE("unbounded growth is reported, not returned") {
  // Q = 400: v ~ e^{20 z} crosses the overflow guard well before z = 30.
  CHECK_THROWS_AS(propagate(const_coeff(400.0), 0.0, 30.0, {1.0, 1.0}, 1e-2),
                  GrowthError);
}
