// Independent verification that a constructed background really carries the
// prescribed eigenvalue, and first-order response of that eigenvalue to
// localized perturbations.
//
// The matching (Evans-style) function: for lambda in a spectral gap of the
// tail, shoot the solution decaying at +infinity from +Z_match down to 0
// and the one decaying at -infinity from -Z_match up to 0, then compare
// logarithmic derivatives:
//
//     iota(lambda) = u_R'(0)/u_R(0) - u_L'(0)/u_L(0),
//
// i.e. the Wronskian of the two shots normalized by u_L(0) u_R(0), which
// makes iota independent of the initial-condition scaling. iota vanishes
// exactly at eigenvalues. Z_match is snapped to a whole number of tail
// periods because the Floquet eigenvector of the monodromy at base point 0
// prescribes valid decaying initial data only there. Shooting runs from the
// far ends toward the matching point, which is the direction in which the
// wanted solution grows, so contamination by the complementary mode decays
// like e^{-2 alpha Z}.
#pragma once

#include <string>
#include <vector>

#include "hillspec/embedder.hpp"
#include "hillspec/numerics.hpp"
#include "hillspec/potentials.hpp"

namespace hillspec {

struct MatchingOptions {
  double Z_match = 15.0;  // snapped to the nearest whole number of periods
  double h = 2e-3;
  std::size_t n_lambda = 101;
  double root_xtol = 1e-10;
};

struct ShootingPair {
  Trajectory left;   // from -Z_eff to 0, decays at -infinity
  Trajectory right;  // from +Z_eff to 0, decays at +infinity
  double iota = 0.0;
};

// Z_match snapped to max(1, round(Z_match / period)) * period.
double snap_to_period(double Z_match, double period);

// One shooting pair at fixed lambda; lambda must lie in a gap of the tail.
ShootingPair shoot_matching(const AsymptoticPotential& A, int m,
                            double lambda, double Z_match, double h);

struct MatchingFunction {
  Interval window;
  double Z_match_used = 0.0;
  std::vector<double> lambda;  // scan grid
  std::vector<double> iota;
  std::vector<double> roots;   // refined, ascending
};

// Scans iota over the window and refines each sign change by bisection.
// The whole window must lie in a gap of the tail.
MatchingFunction matching_function(const AsymptoticPotential& A, int m,
                                   double lo, double hi,
                                   const MatchingOptions& opt = {});

enum class TrackStatus { Located, Disappeared, ThresholdCrossed };

struct TrackedPoint {
  double eps = 0.0;
  TrackStatus status = TrackStatus::Disappeared;
  double lambda = 0.0;  // meaningful only when Located
};

// Follows the eigenvalue of A + eps B for each eps. The search window
// [lambda0 - halfwidth, lambda0 + halfwidth] is clamped to the tail's gap
// around lambda0; losing the root after clamping reports ThresholdCrossed
// (the eigenvalue reached the essential spectrum), losing it inside an
// unclamped window reports Disappeared.
std::vector<TrackedPoint> track_eigenvalue(const AsymptoticPotential& A,
                                           int m, double lambda0,
                                           const LocalizedPerturbation& B,
                                           const std::vector<double>& eps,
                                           double halfwidth = 0.05,
                                           const MatchingOptions& opt = {});

struct PerturbationCheck {
  std::string bump;
  double eps = 0.0;                 // step used for the tracked derivative
  double derivative_formula = 0.0;  // integral 2 (m + A0) B v*^2, unit-L2 v*
  double derivative_tracked = 0.0;  // (lambda(+eps) - lambda(-eps)) / (2 eps)
  double lambda_plus = 0.0;         // tracked eigenvalue at +eps
  double lambda_minus = 0.0;        // tracked eigenvalue at -eps
  double rel_discrepancy = 0.0;
};

// First-order eigenvalue response: the explicit quadratic-form derivative
// against the tracked symmetric difference quotient. Relative disagreement
// beyond 1e-2 is a consistency error. Both derivatives are near zero for
// B = 0; that case compares absolutely.
PerturbationCheck hellmann_feynman(const EmbeddedConstruction& c,
                                   const LocalizedPerturbation& B,
                                   double eps = 1e-4,
                                   const MatchingOptions& opt = {});

}  // namespace hillspec
