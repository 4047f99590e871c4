// Floquet analysis of Hill's equation -v'' + Q(z) v = 0 with Q of period p.
//
// The monodromy matrix M transports (v, v') across one period from base
// point 0. Its multipliers solve rho^2 - 2*gamma*rho + 1 = 0 where gamma =
// trace(M)/2 is the discriminant; the system is trace-free so det M = 1 and
// the multipliers come in reciprocal pairs. |gamma| < 1 is the band regime
// (|rho| = 1), |gamma| > 1 the gap regime (real reciprocal pair), and
// |gamma| = 1 a band edge.
//
// In a gap the eigenvector of the multiplier with |rho| < 1 seeds the
// solution decaying at +infinity and the reciprocal one the solution
// decaying at -infinity; both are Floquet solutions f(z) = e^{alpha z} q(z)
// with q periodic.
#pragma once

#include <complex>
#include <utility>

#include "hillspec/ode.hpp"
#include "hillspec/potentials.hpp"

namespace hillspec {

enum class Regime { Band, Edge, Gap };

struct Monodromy {
  Matrix2 M;
  double period = 0.0;
  double h_used = 0.0;
  double det_drift = 0.0;  // |det M - 1| after any retry
};

inline double default_monodromy_h(double period) { return 1e-3 * period; }

// Fundamental system across [0, period]. The determinant must stay within
// 1e-9 of 1; on drift the step is halved once before giving up.
Monodromy monodromy(const ModeCoefficient& coeff, double period, double h);
Monodromy monodromy(const ModeCoefficient& coeff, double period);
// Uses the coefficient's own period.
Monodromy monodromy(const ModeCoefficient& coeff);

struct FloquetData {
  double discriminant = 0.0;
  std::complex<double> rho_plus;   // |rho_plus| >= 1
  std::complex<double> rho_minus;  // rho_plus * rho_minus = 1
  std::complex<double> alpha;      // log(rho_plus)/period, Re >= 0
  Regime regime = Regime::Band;
  double period = 0.0;
};

// Multipliers and exponents from the monodromy. In the gap regime the
// quadratic is solved in the cancellation-free form rho = gamma +
// sign(gamma) sqrt(gamma^2 - 1), rho_minus = 1/rho_plus. edge_tol decides
// how close |gamma| must come to 1 to classify as an edge.
FloquetData floquet_data(const Monodromy& mono, double edge_tol = 1e-12);

// Eigenvector of the monodromy for multiplier rho, scaled so its value
// component is 1; initial data for the Floquet solution at any whole number
// of periods from the base point. Fails when the eigenvector has no value
// component (the solution vanishes at the base point).
StateVector floquet_eigenvector_unit_value(const Matrix2& M, double rho);

struct FloquetSolution {
  double rho = 0.0;        // this solution's multiplier
  double alpha_abs = 0.0;  // exponential rate |Re alpha|
  bool decays_at_plus_infinity = false;
  Trajectory traj;         // merged two-sided trajectory on [-Z, Z]
};

// The pair (f_plus decaying at -infinity, f_minus decaying at +infinity) on
// [-Z, Z], each normalized to f(0) = 1. Requires a gap with positive
// multipliers; a sign-changing solution (gamma < -1) is rejected since the
// downstream construction divides by these values.
std::pair<FloquetSolution, FloquetSolution> decaying_solutions(
    const ModeCoefficient& coeff, double period, double Z, double h);

}  // namespace hillspec
