// Band structure of periodic mode coefficients.
//
// For fixed mode m the essential spectrum consists of the closed lambda
// intervals where the discriminant gamma(lambda) of -v'' + ((m+A)^2 -
// lambda) v = 0 satisfies |gamma| <= 1. Edges are located as sign changes
// of |gamma(lambda)| - 1 on a uniform scan and refined by bisection; the
// scan is also the figure data the CLI emits.
//
// Conventions: bands are clipped to the scan window; a band still open at
// the top of the window reports +infinity ("beyond the window") as its
// upper end. Tangencies (double crossings within 1e-10) are merged rather
// than reported as hairline gaps or bands.
#pragma once

#include <utility>
#include <vector>

#include "hillspec/floquet.hpp"
#include "hillspec/numerics.hpp"
#include "hillspec/potentials.hpp"

namespace hillspec {

struct DiscriminantScan {
  int m = 0;
  double period = 0.0;
  std::vector<double> lambda;
  std::vector<double> gamma;
};

// Samples gamma on n equally spaced lambda values across [lo, hi].
// h = 0 picks the default monodromy step of the declared period.
DiscriminantScan scan_discriminant(int m, const PeriodicPotential& A,
                                   double period, double lo, double hi,
                                   std::size_t n, double h = 0.0);

struct BandSpectrum {
  int m = 0;
  Interval window;
  std::vector<Interval> bands;
  std::vector<double> edges;           // refined interior edges, ascending
  std::vector<double> edge_residuals;  // ||gamma(edge)| - 1| per edge
  double gamma_at_lo = 0.0;            // orientation check: gamma at window lo
};

// Locates all band edges inside the window to absolute tolerance tol.
// scan_per_unit controls the bracketing resolution (samples per unit
// lambda); edges closer than the scan spacing require a finer scan.
BandSpectrum band_edges(int m, const PeriodicPotential& A, double period,
                        double lo, double hi, double tol,
                        double scan_per_unit = 2000.0, double h = 0.0);

struct EssentialSpectrum {
  Interval window;
  std::vector<BandSpectrum> per_mode;
  std::vector<Interval> bands;  // union over modes
};

// Union of band spectra over modes mode_lo..mode_hi. When A(z + p/2) =
// -A(z) the modes m and -m share a spectrum and are computed once.
EssentialSpectrum essential_spectrum(int mode_lo, int mode_hi,
                                     const PeriodicPotential& A,
                                     double period, double lo, double hi,
                                     double tol,
                                     double scan_per_unit = 2000.0,
                                     double h = 0.0);

struct ThresholdReport {
  double lambda0 = 0.0;
  int own_mode = 0;
  bool embedded = false;  // lambda0 interior to some other mode's band
  double distance_to_nearest_edge = 0.0;
  // Edges within warn_tol of lambda0, as (mode, edge) pairs.
  std::vector<std::pair<int, double>> offending_edges;
  bool warning = false;
};

// Checks whether lambda0 is embedded in the spectrum of the other modes and
// how close it comes to any band edge. Sitting within warn_tol of an edge
// raises the warning flag: the embedded/not-embedded call is then below the
// resolution that band location can certify.
ThresholdReport threshold_report(double lambda0, int own_mode,
                                 const EssentialSpectrum& spectrum,
                                 double warn_tol = 1e-3);

}  // namespace hillspec
