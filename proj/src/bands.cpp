#include "hillspec/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hillspec/errors.hpp"

namespace hillspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTangencyTol = 1e-10;

double gamma_at(int m, const PeriodicPotential& A, double period, double h,
                double lambda) {
  const ModeCoefficient coeff(m, A, lambda);
  return monodromy(coeff, period, h).M.trace() / 2.0;
}

}  // namespace

DiscriminantScan scan_discriminant(int m, const PeriodicPotential& A,
                                   double period, double lo, double hi,
                                   std::size_t n, double h) {
  if (!(hi > lo)) throw DomainError("discriminant scan: empty window");
  if (n < 2) throw DomainError("discriminant scan: needs >= 2 samples");
  if (h == 0.0) h = default_monodromy_h(period);
  DiscriminantScan out;
  out.m = m;
  out.period = period;
  out.lambda.resize(n);
  out.gamma.resize(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = lo + step * static_cast<double>(i);
    out.lambda[i] = lam;
    out.gamma[i] = gamma_at(m, A, period, h, lam);
  }
  return out;
}

BandSpectrum band_edges(int m, const PeriodicPotential& A, double period,
                        double lo, double hi, double tol,
                        double scan_per_unit, double h) {
  if (!(tol > 0.0)) throw DomainError("band edges: tol must be positive");
  if (h == 0.0) h = default_monodromy_h(period);
  const std::size_t n = std::max<std::size_t>(
      17, static_cast<std::size_t>(std::ceil((hi - lo) * scan_per_unit)) + 1);
  const DiscriminantScan scan = scan_discriminant(m, A, period, lo, hi, n, h);

  // g = |gamma| - 1: negative in a band, positive in a gap.
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::fabs(scan.gamma[i]) - 1.0;

  BandSpectrum out;
  out.m = m;
  out.window = {lo, hi};
  out.gamma_at_lo = scan.gamma.front();

  const auto gfun = [&](double lam) {
    return std::fabs(gamma_at(m, A, period, h, lam)) - 1.0;
  };
  // Sign transitions of g, with exact zeros counted as "inside": a sample
  // landing on an edge is picked up by whichever neighbor cell crosses.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((g[i] > 0.0) != (g[i + 1] > 0.0)) {
      const double e = bisect(gfun, scan.lambda[i], scan.lambda[i + 1], g[i],
                              g[i + 1], tol);
      out.edges.push_back(e);
    }
  }
  // Deduplicate edges that two adjacent cells refined to the same point.
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end(),
                              [](double a, double b) {
                                return std::fabs(a - b) <= kTangencyTol;
                              }),
                  out.edges.end());
  for (double e : out.edges)
    out.edge_residuals.push_back(std::fabs(gfun(e)));

  // Assemble clipped band intervals. A band still open at the window top is
  // reported as unbounded ("beyond the window").
  bool inside = !(g.front() > 0.0);
  double start = lo;
  for (double e : out.edges) {
    if (inside)
      out.bands.push_back({start, e});
    else
      start = e;
    inside = !inside;
  }
  if (inside) out.bands.push_back({start, kInf});

  // Drop hairline bands and merge across hairline gaps (tangencies).
  std::vector<Interval> kept;
  for (const Interval& b : out.bands)
    if (!(b.hi - b.lo <= kTangencyTol)) kept.push_back(b);
  out.bands = merge_intervals(std::move(kept), kTangencyTol);
  return out;
}

EssentialSpectrum essential_spectrum(int mode_lo, int mode_hi,
                                     const PeriodicPotential& A,
                                     double period, double lo, double hi,
                                     double tol, double scan_per_unit,
                                     double h) {
  if (mode_lo > mode_hi)
    throw DomainError("essential spectrum: empty mode range");
  EssentialSpectrum out;
  out.window = {lo, hi};
  const bool flip = A.flip_symmetric();
  for (int m = mode_lo; m <= mode_hi; ++m) {
    if (flip) {
      // A(z + p/2) = -A(z) makes modes m and -m isospectral: their
      // coefficients differ by a half-period translation.
      const auto done =
          std::find_if(out.per_mode.begin(), out.per_mode.end(),
                       [&](const BandSpectrum& s) { return s.m == -m; });
      if (done != out.per_mode.end()) {
        BandSpectrum copy = *done;
        copy.m = m;
        out.per_mode.push_back(std::move(copy));
        continue;
      }
    }
    out.per_mode.push_back(
        band_edges(m, A, period, lo, hi, tol, scan_per_unit, h));
  }
  std::vector<Interval> all;
  for (const BandSpectrum& s : out.per_mode)
    all.insert(all.end(), s.bands.begin(), s.bands.end());
  out.bands = merge_intervals(std::move(all), kTangencyTol);
  return out;
}

ThresholdReport threshold_report(double lambda0, int own_mode,
                                 const EssentialSpectrum& spectrum,
                                 double warn_tol) {
  ThresholdReport out;
  out.lambda0 = lambda0;
  out.own_mode = own_mode;
  out.distance_to_nearest_edge = std::numeric_limits<double>::infinity();
  for (const BandSpectrum& s : spectrum.per_mode) {
    if (s.m != own_mode)
      for (const Interval& b : s.bands)
        if (b.lo < lambda0 && lambda0 < b.hi) out.embedded = true;
    for (double e : s.edges) {
      const double d = std::fabs(lambda0 - e);
      out.distance_to_nearest_edge =
          std::min(out.distance_to_nearest_edge, d);
      if (d <= warn_tol) out.offending_edges.emplace_back(s.m, e);
    }
  }
  out.warning = !out.offending_edges.empty();
  return out;
}

}  // namespace hillspec
