// Fixed-step Dormand-Prince 5(4) integration of -v'' + Q(z) v = 0, written
// as the first-order system v' = w, w' = Q v. Backward integration reuses
// the forward stepper by negating the independent variable, so there is one
// code path for both directions.
//
// Trajectories store (v, v', v'') on the step grid and evaluate between
// nodes with a quintic two-point Taylor (Hermite) interpolant, which keeps
// dense output at the O(h^4) accuracy needed by the residual diagnostics.
// Every propagation is cross-checked against a half-step re-integration;
// the end-state discrepancy is stored as the trajectory's global error
// estimate.
#pragma once

#include <cstddef>
#include <vector>

#include "hillspec/potentials.hpp"

namespace hillspec {

struct StateVector {
  double v = 0.0;
  double vp = 0.0;
};

// Fundamental 2x2 system [[phi1, phi2], [phi1', phi2']] at the interval end,
// from initial data phi1 = (1,0), phi2 = (0,1).
struct Matrix2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;
  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
};

class Trajectory {
 public:
  Trajectory() = default;

  std::size_t size() const { return z_.size(); }
  double h() const { return h_; }
  double z_front() const { return z_.front(); }
  double z_back() const { return z_.back(); }
  double z_at(std::size_t i) const { return z_[i]; }
  double v_at(std::size_t i) const { return v_[i]; }
  double vp_at(std::size_t i) const { return vp_[i]; }
  double vpp_at(std::size_t i) const { return vpp_[i]; }
  const std::vector<double>& z_grid() const { return z_; }
  const std::vector<double>& v_grid() const { return v_; }

  StateVector end_state() const { return {v_.back(), vp_.back()}; }
  StateVector start_state() const { return {v_.front(), vp_.front()}; }

  // Dense output; z must lie inside [z_front, z_back].
  double value(double z) const;
  double deriv(double z) const;
  double second_deriv(double z) const;

  // Max-norm end-state discrepancy against the half-step re-integration,
  // relative to max(1, |end state|).
  double error_estimate() const { return err_; }

  // Joins two trajectories sharing an endpoint node (left.z_back ==
  // right.z_front) into one grid.
  static Trajectory merge(const Trajectory& left, const Trajectory& right);

  // Builds a trajectory directly from analytic node data (used by tests).
  static Trajectory from_nodes(std::vector<double> z, std::vector<double> v,
                               std::vector<double> vp, std::vector<double> vpp);

 private:
  friend Trajectory propagate(const ModeCoefficient&, double, double,
                              StateVector, double);
  void locate(double z, std::size_t& i, double& s) const;

  std::vector<double> z_, v_, vp_, vpp_;
  double h_ = 0.0;
  double err_ = 0.0;
};

// Integrates from z0 to z1 (either order) with step magnitude ~h; the step
// count is rounded so nodes land exactly on z1, and at least 10 steps are
// required. The returned grid is ascending regardless of direction.
Trajectory propagate(const ModeCoefficient& coeff, double z0, double z1,
                     StateVector init, double h);

// End matrix of the fundamental system over [z0, z1]; no dense storage.
Matrix2 propagate_fundamental(const ModeCoefficient& coeff, double z0,
                              double z1, double h);

// ODE defect |v''(z) - Q(z) v(z)| of the dense interpolant. Identically
// zero at nodes by construction; between nodes it measures both the
// integration and the interpolation error.
double residual_at(const Trajectory& t, const ModeCoefficient& coeff,
                   double z);

}  // namespace hillspec
