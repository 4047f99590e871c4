#include "hillspec/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hillspec/errors.hpp"
#include "hillspec/io_util.hpp"

namespace hillspec {

namespace iou = ioutil;

double snap_to_period(double Z_match, double period) {
  if (!(Z_match > 0.0)) throw DomainError("Z_match must be positive");
  const double k = std::max(1.0, std::round(Z_match / period));
  return k * period;
}

ShootingPair shoot_matching(const AsymptoticPotential& A, int m,
                            double lambda, double Z_match, double h) {
  const double period = A.tail().period();
  const double Z_eff = snap_to_period(Z_match, period);

  const ModeCoefficient tail_coeff(m, A.tail(), lambda);
  const Monodromy mono = monodromy(tail_coeff, period);
  const FloquetData data = floquet_data(mono);
  if (data.regime != Regime::Gap)
    throw DomainError("matching: lambda = " + iou::fmt17(lambda) +
                      " is not in a spectral gap of the tail");
  const double rho_big = data.rho_plus.real();
  const double rho_small = data.rho_minus.real();

  // At z = +-Z_eff (whole periods from 0) the decaying Floquet directions
  // coincide with the monodromy eigenvectors at the base point.
  const StateVector w_right =
      floquet_eigenvector_unit_value(mono.M, rho_small);
  const StateVector w_left = floquet_eigenvector_unit_value(mono.M, rho_big);

  const ModeCoefficient coeff(m, A, lambda);
  ShootingPair out;
  out.right = propagate(coeff, Z_eff, 0.0, w_right, h);
  out.left = propagate(coeff, -Z_eff, 0.0, w_left, h);

  const StateVector uR = out.right.start_state();  // grid ascends from z = 0
  const StateVector uL = out.left.end_state();
  if (uR.v == 0.0 || uL.v == 0.0) {
    out.iota = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.iota = uR.vp / uR.v - uL.vp / uL.v;
  }
  return out;
}

MatchingFunction matching_function(const AsymptoticPotential& A, int m,
                                   double lo, double hi,
                                   const MatchingOptions& opt) {
  if (!(hi > lo)) throw DomainError("matching: empty lambda window");
  if (opt.n_lambda < 2) throw DomainError("matching: needs >= 2 scan points");
  MatchingFunction out;
  out.window = {lo, hi};
  out.Z_match_used = snap_to_period(opt.Z_match, A.tail().period());

  const auto iota_at = [&](double lam) {
    return shoot_matching(A, m, lam, opt.Z_match, opt.h).iota;
  };

  const double step =
      (hi - lo) / static_cast<double>(opt.n_lambda - 1);
  out.lambda.resize(opt.n_lambda);
  out.iota.resize(opt.n_lambda);
  for (std::size_t i = 0; i < opt.n_lambda; ++i) {
    out.lambda[i] = lo + step * static_cast<double>(i);
    out.iota[i] = iota_at(out.lambda[i]);
  }
  for (std::size_t i = 0; i + 1 < opt.n_lambda; ++i) {
    const double fa = out.iota[i], fb = out.iota[i + 1];
    if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
    // An exact zero sample is its own root; duplicates from the adjacent
    // cell are removed below.
    if (fa == 0.0 || (fa > 0.0) != (fb > 0.0)) {
      out.roots.push_back(bisect(iota_at, out.lambda[i], out.lambda[i + 1],
                                 fa, fb, opt.root_xtol));
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  out.roots.erase(std::unique(out.roots.begin(), out.roots.end(),
                              [&](double a, double b) {
                                return std::fabs(a - b) <= opt.root_xtol;
                              }),
                  out.roots.end());
  return out;
}

std::vector<TrackedPoint> track_eigenvalue(const AsymptoticPotential& A,
                                           int m, double lambda0,
                                           const LocalizedPerturbation& B,
                                           const std::vector<double>& eps,
                                           double halfwidth,
                                           const MatchingOptions& opt) {
  if (!(halfwidth > 0.0)) throw DomainError("track: halfwidth must be > 0");
  const double period = A.tail().period();

  // Gap bounds around lambda0 in the tail spectrum; the search window is
  // clamped to the gap so a root escaping through a band edge is reported
  // as a threshold crossing rather than silently lost.
  const BandSpectrum tail_bands =
      band_edges(m, A.tail(), period, lambda0 - 2.0 * halfwidth,
                 lambda0 + 2.0 * halfwidth, 1e-9);
  for (const Interval& b : tail_bands.bands)
    if (b.lo < lambda0 && lambda0 < b.hi)
      throw DomainError("track: lambda0 lies inside a band of the tail");
  double gap_lo = lambda0 - halfwidth, gap_hi = lambda0 + halfwidth;
  constexpr double kEdgeMargin = 1e-4;
  for (double e : tail_bands.edges) {
    if (e <= lambda0) gap_lo = std::max(gap_lo, e + kEdgeMargin);
    if (e >= lambda0) gap_hi = std::min(gap_hi, e - kEdgeMargin);
  }
  const bool clamped =
      gap_lo > lambda0 - halfwidth || gap_hi < lambda0 + halfwidth;

  std::vector<TrackedPoint> out;
  out.reserve(eps.size());
  for (double e : eps) {
    const AsymptoticPotential Ae = A.perturbed(B, e);
    const MatchingFunction mf =
        matching_function(Ae, m, gap_lo, gap_hi, opt);
    TrackedPoint p;
    p.eps = e;
    if (mf.roots.empty()) {
      p.status =
          clamped ? TrackStatus::ThresholdCrossed : TrackStatus::Disappeared;
    } else {
      p.status = TrackStatus::Located;
      p.lambda = *std::min_element(
          mf.roots.begin(), mf.roots.end(), [&](double a, double b) {
            return std::fabs(a - lambda0) < std::fabs(b - lambda0);
          });
    }
    out.push_back(p);
  }
  return out;
}

PerturbationCheck hellmann_feynman(const EmbeddedConstruction& c,
                                   const LocalizedPerturbation& B,
                                   double eps, const MatchingOptions& opt) {
  if (eps == 0.0) throw DomainError("perturbation check: eps must be nonzero");
  PerturbationCheck out;
  out.bump = B.label();
  out.eps = eps;

  // Quadratic-form derivative with v* normalized to unit L2 on the window.
  const double h_grid = c.z[1] - c.z[0];
  std::vector<double> num(c.z.size()), den(c.z.size());
  for (std::size_t i = 0; i < c.z.size(); ++i) {
    const double v2 = c.v_star[i] * c.v_star[i];
    num[i] = 2.0 * (static_cast<double>(c.m) + c.A0[i]) * B(c.z[i]) * v2;
    den[i] = v2;
  }
  out.derivative_formula = simpson(num, h_grid) / simpson(den, h_grid);

  MatchingOptions topt = opt;
  topt.n_lambda = std::min<std::size_t>(opt.n_lambda, 15);
  topt.root_xtol = std::min(opt.root_xtol, 1e-12);
  const AsymptoticPotential A = c.potential();
  const std::vector<TrackedPoint> pts = track_eigenvalue(
      A, c.m, c.lambda0, B, {eps, -eps}, /*halfwidth=*/0.01, topt);
  for (const TrackedPoint& p : pts)
    if (p.status != TrackStatus::Located)
      throw AccuracyError(
          "perturbation check: tracked eigenvalue lost at eps = " +
          iou::fmt17(p.eps));
  out.lambda_plus = pts[0].lambda;
  out.lambda_minus = pts[1].lambda;
  out.derivative_tracked = (out.lambda_plus - out.lambda_minus) / (2.0 * eps);

  const double scale =
      std::max(std::fabs(out.derivative_formula),
               std::fabs(out.derivative_tracked));
  if (scale <= 1e-8) {
    out.rel_discrepancy = 0.0;  // both derivatives vanish (e.g. B = 0)
  } else {
    out.rel_discrepancy =
        std::fabs(out.derivative_formula - out.derivative_tracked) / scale;
  }
  if (out.rel_discrepancy > 1e-2)
    throw AccuracyError(
        "perturbation check: explicit and tracked derivatives disagree by " +
        iou::fmt17(out.rel_discrepancy) + " (relative)");
  return out;
}

}  // namespace hillspec
