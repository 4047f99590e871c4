#include "hillspec/floquet.hpp"

#include <cmath>
#include <limits>

#include "hillspec/errors.hpp"
#include "hillspec/io_util.hpp"

namespace hillspec {

namespace {

// det M - 1 is computed as a difference of products of the matrix entries,
// so in deep gaps (entries of size e^{alpha p}) it carries an irreducible
// round-off of order ||M||^2 eps. The acceptance threshold has to grow with
// that floor or large-|m| scans reject exact arithmetic.
double det_drift_tol(const Matrix2& M) {
  const double norm = std::max(std::max(std::fabs(M.a), std::fabs(M.b)),
                               std::max(std::fabs(M.c), std::fabs(M.d)));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return std::max(1e-9, 100.0 * eps * norm * norm);
}

}  // namespace

Monodromy monodromy(const ModeCoefficient& coeff, double period, double h) {
  if (!(period > 0.0)) throw DomainError("monodromy: period must be positive");
  Monodromy out;
  out.period = period;
  out.h_used = h;
  out.M = propagate_fundamental(coeff, 0.0, period, h);
  out.det_drift = std::fabs(out.M.det() - 1.0);
  if (out.det_drift > det_drift_tol(out.M)) {
    out.h_used = 0.5 * h;
    out.M = propagate_fundamental(coeff, 0.0, period, out.h_used);
    out.det_drift = std::fabs(out.M.det() - 1.0);
    if (out.det_drift > det_drift_tol(out.M))
      throw AccuracyError("monodromy determinant drift " +
                          ioutil::fmt17(out.det_drift) +
                          " persists after halving the step");
  }
  return out;
}

Monodromy monodromy(const ModeCoefficient& coeff, double period) {
  return monodromy(coeff, period, default_monodromy_h(period));
}

Monodromy monodromy(const ModeCoefficient& coeff) {
  if (!coeff.period())
    throw DomainError("monodromy: coefficient has no period");
  return monodromy(coeff, *coeff.period());
}

FloquetData floquet_data(const Monodromy& mono, double edge_tol) {
  FloquetData out;
  out.period = mono.period;
  const double g = mono.M.trace() / 2.0;
  out.discriminant = g;
  if (std::fabs(std::fabs(g) - 1.0) <= edge_tol) {
    out.regime = Regime::Edge;
    const double s = (g >= 0.0) ? 1.0 : -1.0;
    out.rho_plus = s;
    out.rho_minus = s;
    out.alpha = std::log(std::complex<double>(s)) / mono.period;
  } else if (std::fabs(g) < 1.0) {
    out.regime = Regime::Band;
    const double im = std::sqrt(1.0 - g * g);
    out.rho_plus = {g, im};
    out.rho_minus = {g, -im};
    out.alpha = std::complex<double>(0.0, std::atan2(im, g) / mono.period);
  } else {
    out.regime = Regime::Gap;
    const double s = (g > 0.0) ? 1.0 : -1.0;
    const double big = g + s * std::sqrt(g * g - 1.0);
    out.rho_plus = big;
    out.rho_minus = 1.0 / big;
    out.alpha = std::log(std::complex<double>(big)) / mono.period;
  }
  return out;
}

// The two candidate eigenvector forms (b, rho - a) and (rho - d, c) span
// the same line; the larger one is numerically safer.
StateVector floquet_eigenvector_unit_value(const Matrix2& M, double rho) {
  const double n1 = std::fabs(M.b) + std::fabs(rho - M.a);
  const double n2 = std::fabs(rho - M.d) + std::fabs(M.c);
  double w1, w2;
  if (n1 >= n2) {
    w1 = M.b;
    w2 = rho - M.a;
  } else {
    w1 = rho - M.d;
    w2 = M.c;
  }
  const double scale = std::max(std::fabs(w1), std::fabs(w2));
  if (scale == 0.0 || std::fabs(w1) < 1e-14 * scale)
    throw DomainError(
        "Floquet eigenvector has a vanishing value component; cannot "
        "normalize f(0) = 1");
  return {1.0, w2 / w1};
}

namespace {

FloquetSolution two_sided(const ModeCoefficient& coeff, StateVector init,
                          double Z, double h, double rho, double alpha_abs,
                          bool decays_plus) {
  const Trajectory right = propagate(coeff, 0.0, Z, init, h);
  const Trajectory left = propagate(coeff, 0.0, -Z, init, h);
  FloquetSolution s;
  s.rho = rho;
  s.alpha_abs = alpha_abs;
  s.decays_at_plus_infinity = decays_plus;
  s.traj = Trajectory::merge(left, right);
  for (std::size_t i = 0; i < s.traj.size(); ++i)
    if (!(s.traj.v_at(i) > 0.0))
      throw DomainError("Floquet solution is not positive at z = " +
                        ioutil::fmt17(s.traj.z_at(i)) +
                        " (sign-changing multiplier regime?)");
  return s;
}

}  // namespace

std::pair<FloquetSolution, FloquetSolution> decaying_solutions(
    const ModeCoefficient& coeff, double period, double Z, double h) {
  if (!(Z > 0.0)) throw DomainError("decaying_solutions: Z must be positive");
  const Monodromy mono = monodromy(coeff, period);
  const FloquetData data = floquet_data(mono);
  if (data.regime != Regime::Gap)
    throw DomainError(
        "decaying_solutions: lambda lies in a band or at an edge; no "
        "exponentially decaying pair exists");
  const double rho_big = data.rho_plus.real();
  const double rho_small = data.rho_minus.real();
  const double alpha_abs = std::fabs(data.alpha.real());
  // Growing multiplier -> f_plus = e^{+alpha z} q(z), decays at -infinity.
  const StateVector wb = floquet_eigenvector_unit_value(mono.M, rho_big);
  const StateVector ws = floquet_eigenvector_unit_value(mono.M, rho_small);
  FloquetSolution f_plus =
      two_sided(coeff, wb, Z, h, rho_big, alpha_abs, false);
  FloquetSolution f_minus =
      two_sided(coeff, ws, Z, h, rho_small, alpha_abs, true);
  return {std::move(f_plus), std::move(f_minus)};
}

}  // namespace hillspec
