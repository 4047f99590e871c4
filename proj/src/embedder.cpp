#include "hillspec/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "hillspec/errors.hpp"
#include "hillspec/io_util.hpp"

namespace hillspec {

namespace iou = ioutil;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_same_grid(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size() ||
      std::fabs(a.z_front() - b.z_front()) > 1e-12 ||
      std::fabs(a.z_back() - b.z_back()) > 1e-12)
    throw DomainError("Floquet solutions live on different grids");
}

// Window weights (1 -+ tanh(beta z))/2 in logistic form. The direct form
// loses all relative accuracy once tanh rounds to +-1, and the resulting
// node-level noise rides on the exponentially grown solution, which the
// five-point residual stencil then amplifies by 1/h^2.
double window_plus(double beta_z) { return 1.0 / (1.0 + std::exp(2.0 * beta_z)); }
double window_minus(double beta_z) { return 1.0 / (1.0 + std::exp(-2.0 * beta_z)); }

}  // namespace

std::vector<double> build_v_star(const FloquetSolution& f_plus,
                                 const FloquetSolution& f_minus,
                                 double beta) {
  if (!(beta > 0.0)) throw DomainError("v*: beta must be positive");
  if (f_plus.decays_at_plus_infinity || !f_minus.decays_at_plus_infinity)
    throw DomainError("v*: solutions passed in the wrong order");
  check_same_grid(f_plus.traj, f_minus.traj);
  const std::size_t n = f_plus.traj.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double bz = beta * f_plus.traj.z_at(i);
    v[i] = window_plus(bz) * f_plus.traj.v_at(i) +
           window_minus(bz) * f_minus.traj.v_at(i);
  }
  return v;
}

SPair build_S(const FloquetSolution& f_plus, const FloquetSolution& f_minus,
              double beta, const std::vector<double>& v_star, int m,
              const PeriodicPotential& A_per, double lambda0) {
  check_same_grid(f_plus.traj, f_minus.traj);
  const std::size_t n = f_plus.traj.size();
  if (v_star.size() != n) throw DomainError("S: v* grid mismatch");
  SPair out;
  out.S.resize(n);
  out.form_discrepancy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = f_plus.traj.z_at(i);
    const double fp = f_plus.traj.v_at(i), fpd = f_plus.traj.vp_at(i);
    const double fm = f_minus.traj.v_at(i), fmd = f_minus.traj.vp_at(i);
    const double th = std::tanh(beta * z);
    const double ch = std::cosh(beta * z);
    const double sech2 = 1.0 / (ch * ch);
    if (!(v_star[i] != 0.0))
      throw DomainError("S: v* vanishes at z = " + iou::fmt17(z));
    // Window-commutator assembly: all f'' terms cancel against Q v*.
    const double num =
        beta * sech2 * (beta * th * (fp - fm) - (fpd - fmd));
    const double s2 = num / v_star[i];
    // Defining ratio, v*'' assembled analytically via f'' = Q f.
    const double a = A_per(z);
    const double Q = (static_cast<double>(m) + a) *
                         (static_cast<double>(m) + a) -
                     lambda0;
    const double vpp = window_plus(beta * z) * f_plus.traj.vpp_at(i) +
                       window_minus(beta * z) * f_minus.traj.vpp_at(i) +
                       beta * sech2 * (fmd - fpd) -
                       beta * beta * sech2 * th * (fm - fp);
    const double s1 = vpp / v_star[i] - Q;
    out.S[i] = s2;
    out.form_discrepancy =
        std::max(out.form_discrepancy, std::fabs(s1 - s2));
  }
  return out;
}

A0Result build_A0(const std::vector<double>& z, const std::vector<double>& S,
                  int m, const PeriodicPotential& A_per) {
  if (z.size() != S.size()) throw DomainError("A0: grid mismatch");
  A0Result out;
  out.A0.resize(z.size());
  out.min_radicand = std::numeric_limits<double>::infinity();
  std::string offending;
  int bad = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double base = static_cast<double>(m) + A_per(z[i]);
    const double r = base * base + S[i];
    out.min_radicand = std::min(out.min_radicand, r);
    if (!(r > 0.0)) {
      if (bad < 4) offending += (bad ? ", " : "") + iou::fmt17(z[i]);
      ++bad;
    } else {
      out.A0[i] = -static_cast<double>(m) + std::sqrt(r);
    }
  }
  if (bad > 0)
    throw DomainError(
        "flux correction radicand (m + A_per)^2 + S is not positive at z = " +
        offending + (bad > 4 ? ", ..." : "") +
        "; no real corrected background exists on this grid");
  return out;
}

double fd_residual_sup(const std::vector<double>& z,
                       const std::vector<double>& v,
                       const std::vector<double>& A0, int m,
                       double lambda0) {
  const std::size_t n = z.size();
  if (n < 5 || v.size() != n || A0.size() != n)
    throw DomainError("residual: needs >= 5 aligned samples");
  const double h = z[1] - z[0];
  double sup = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double d2 = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] +
                       16.0 * v[i + 1] - v[i + 2]) /
                      (12.0 * h * h);
    const double base = static_cast<double>(m) + A0[i];
    const double r = -d2 + (base * base - lambda0) * v[i];
    sup = std::max(sup, std::fabs(r));
  }
  return sup;
}

double decay_fit_lo(double Z, double period) {
  return std::min(10.0, Z - 1.5 * period);
}

AsymptoticPotential EmbeddedConstruction::potential() const {
  return AsymptoticPotential::from_grid(z, A0, tail);
}

EmbeddedConstruction construct(double lambda0, int m,
                               const PeriodicPotential& A_per,
                               const ConstructOptions& opt) {
  if (!(opt.beta > 0.0)) throw DomainError("construct: beta must be positive");
  if (!(opt.Z > 0.0)) throw DomainError("construct: Z must be positive");
  const double period = A_per.period();

  const ModeCoefficient coeff(m, A_per, lambda0);
  auto [f_plus, f_minus] = decaying_solutions(coeff, period, opt.Z, opt.h);

  EmbeddedConstruction c;
  c.lambda0 = lambda0;
  c.m = m;
  c.beta = opt.beta;
  c.alpha = f_plus.alpha_abs;
  c.tail = A_per;

  // The window must dominate the Floquet growth (v* decay) and beat it with
  // margin (decay of the correction A0 - A_per ~ e^{-2(beta-alpha)|z|}).
  if (!(c.alpha < opt.beta))
    throw DomainError(
        "construct: the window rate beta must exceed the Floquet exponent "
        "alpha = " +
        iou::fmt17(c.alpha) + "; got beta = " + iou::fmt17(opt.beta));

  c.z = f_plus.traj.z_grid();
  c.v_star = build_v_star(f_plus, f_minus, opt.beta);

  SPair sp = build_S(f_plus, f_minus, opt.beta, c.v_star, m, A_per, lambda0);
  c.S = std::move(sp.S);
  c.s_form_discrepancy = sp.form_discrepancy;

  A0Result a0 = build_A0(c.z, c.S, m, A_per);
  c.A0 = std::move(a0.A0);
  c.min_radicand = a0.min_radicand;

  c.A_per.resize(c.z.size());
  for (std::size_t i = 0; i < c.z.size(); ++i) c.A_per[i] = A_per(c.z[i]);

  c.v_star_sup = 0.0;
  double v_min = std::numeric_limits<double>::infinity();
  for (double v : c.v_star) {
    c.v_star_sup = std::max(c.v_star_sup, std::fabs(v));
    v_min = std::min(v_min, v);
  }
  c.eigenfunction_positive = v_min > 0.0;

  c.residual_sup = fd_residual_sup(c.z, c.v_star, c.A0, m, lambda0);

  // The fit window is derived from the stored grid endpoints (not opt.Z) so
  // that re-running the fit from the emitted files reproduces it exactly.
  const double h_grid = c.z[1] - c.z[0];
  try {
    c.decay_rate_fit =
        fit_decay_rate(c.z.front(), h_grid, c.v_star,
                       decay_fit_lo(c.z.back(), period), c.z.back(), period);
  } catch (const DomainError&) {
    c.decay_rate_fit = kNaN;  // window too short for a period-strided fit
  }

  {
    std::vector<double> diff(c.z.size());
    for (std::size_t i = 0; i < c.z.size(); ++i)
      diff[i] = c.A0[i] - c.A_per[i];
    c.a2_integral = simpson(diff, h_grid);
  }
  c.seam_mismatch = std::max(std::fabs(c.A0.front() - c.A_per.front()),
                             std::fabs(c.A0.back() - c.A_per.back()));

  if (opt.threshold_check) {
    const double lo = std::max(0.0, lambda0 - opt.threshold_halfwidth);
    const double hi = lambda0 + opt.threshold_halfwidth;
    const EssentialSpectrum spec =
        essential_spectrum(opt.threshold_mode_lo, opt.threshold_mode_hi,
                           A_per, period, lo, hi, 1e-6);
    c.threshold = threshold_report(lambda0, m, spec, opt.threshold_warn_tol);
  }

  if (opt.strict) {
    std::string why;
    if (c.threshold && c.threshold->warning)
      why = "lambda0 is within " + iou::fmt17(opt.threshold_warn_tol) +
            " of a band edge";
    else if (c.threshold && !c.threshold->embedded)
      why = "lambda0 is not embedded in the other modes' spectrum";
    else if (c.residual_sup > 1e-6 * c.v_star_sup)
      why = "eigenfunction residual exceeds 1e-6 * sup|v*|";
    else if (!c.eigenfunction_positive)
      why = "v* is not positive";
    if (!why.empty()) throw DomainError("strict construction check: " + why);
  }
  return c;
}

void save_construction(const EmbeddedConstruction& c,
                       const std::string& prefix) {
  const std::filesystem::path csv_path(prefix + "construction.csv");
  if (csv_path.has_parent_path())
    std::filesystem::create_directories(csv_path.parent_path());

  std::ostringstream csv;
  csv << "z,v_star,S,A0,A_per\n";
  for (std::size_t i = 0; i < c.z.size(); ++i)
    csv << iou::fmt17(c.z[i]) << "," << iou::fmt17(c.v_star[i]) << ","
        << iou::fmt17(c.S[i]) << "," << iou::fmt17(c.A0[i]) << ","
        << iou::fmt17(c.A_per[i]) << "\n";
  iou::write_file(csv_path.string(), csv.str());

  json diag;
  diag["lambda0"] = c.lambda0;
  diag["m"] = c.m;
  diag["beta"] = c.beta;
  diag["alpha"] = c.alpha;
  diag["residual_sup"] = c.residual_sup;
  diag["decay_rate_fit"] = c.decay_rate_fit;
  diag["min_radicand"] = c.min_radicand;
  iou::write_file(prefix + "diagnostics.json", diag.dump(2) + "\n");
}

EmbeddedConstruction load_construction(const std::string& prefix,
                                       const PeriodicPotential& tail) {
  EmbeddedConstruction c;
  c.tail = tail;

  const std::string csv = iou::read_file(prefix + "construction.csv");
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || iou::trim(line) != "z,v_star,S,A0,A_per")
    throw DomainError(prefix +
                      "construction.csv: expected header z,v_star,S,A0,A_per");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (iou::trim(line).empty()) continue;
    const auto cells = iou::split(line, ',');
    if (cells.size() != 5)
      throw DomainError(prefix + "construction.csv:" +
                        std::to_string(lineno) + ": expected 5 columns");
    c.z.push_back(iou::to_double(cells[0], "z"));
    c.v_star.push_back(iou::to_double(cells[1], "v_star"));
    c.S.push_back(iou::to_double(cells[2], "S"));
    c.A0.push_back(iou::to_double(cells[3], "A0"));
    c.A_per.push_back(iou::to_double(cells[4], "A_per"));
  }
  if (c.z.size() < 5)
    throw DomainError(prefix + "construction.csv: too few rows");

  json diag;
  try {
    diag = json::parse(iou::read_file(prefix + "diagnostics.json"));
  } catch (const json::parse_error& e) {
    throw DomainError(prefix + "diagnostics.json: " + e.what());
  }
  const auto need = [&](const char* key) -> const json& {
    if (!diag.contains(key))
      throw DomainError(prefix + "diagnostics.json: missing key '" +
                        std::string(key) + "'");
    return diag[key];
  };
  c.lambda0 = need("lambda0").get<double>();
  c.m = need("m").get<int>();
  c.beta = need("beta").get<double>();
  c.alpha = need("alpha").get<double>();
  c.residual_sup = need("residual_sup").get<double>();
  c.decay_rate_fit = need("decay_rate_fit").is_null()
                         ? kNaN
                         : need("decay_rate_fit").get<double>();
  c.min_radicand = need("min_radicand").get<double>();

  c.v_star_sup = 0.0;
  double v_min = std::numeric_limits<double>::infinity();
  for (double v : c.v_star) {
    c.v_star_sup = std::max(c.v_star_sup, std::fabs(v));
    v_min = std::min(v_min, v);
  }
  c.eigenfunction_positive = v_min > 0.0;
  c.s_form_discrepancy = kNaN;  // needs the Floquet pair, not stored
  const double h_grid = c.z[1] - c.z[0];
  {
    std::vector<double> diff(c.z.size());
    for (std::size_t i = 0; i < c.z.size(); ++i)
      diff[i] = c.A0[i] - c.A_per[i];
    c.a2_integral = simpson(diff, h_grid);
  }
  c.seam_mismatch = std::max(std::fabs(c.A0.front() - c.A_per.front()),
                             std::fabs(c.A0.back() - c.A_per.back()));
  return c;
}

VerifyReport verify_construction(const std::string& prefix,
                                 const PeriodicPotential& tail) {
  const EmbeddedConstruction c = load_construction(prefix, tail);
  VerifyReport r;

  r.residual_sup = fd_residual_sup(c.z, c.v_star, c.A0, c.m, c.lambda0);

  double min_rad = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.z.size(); ++i) {
    const double base = static_cast<double>(c.m) + c.A_per[i];
    min_rad = std::min(min_rad, base * base + c.S[i]);
  }
  r.min_radicand = min_rad;

  const double h_grid = c.z[1] - c.z[0];
  const double period = tail.period();
  try {
    r.decay_rate_fit =
        fit_decay_rate(c.z.front(), h_grid, c.v_star,
                       decay_fit_lo(c.z.back(), period), c.z.back(), period);
  } catch (const DomainError&) {
    r.decay_rate_fit = kNaN;
  }

  const ModeCoefficient coeff(c.m, tail, c.lambda0);
  const FloquetData data = floquet_data(monodromy(coeff, period));
  r.alpha = std::fabs(data.alpha.real());

  const auto dev = [](double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return 0.0;
    return std::fabs(a - b);
  };
  r.dev_alpha = dev(r.alpha, c.alpha);
  r.dev_residual_sup = dev(r.residual_sup, c.residual_sup);
  r.dev_decay_rate_fit = dev(r.decay_rate_fit, c.decay_rate_fit);
  r.dev_min_radicand = dev(r.min_radicand, c.min_radicand);

  r.v_star_min = std::numeric_limits<double>::infinity();
  for (double v : c.v_star) r.v_star_min = std::min(r.v_star_min, v);
  r.seam_mismatch = c.seam_mismatch;

  r.pass = r.dev_alpha <= 1e-10 && r.dev_residual_sup <= 1e-10 &&
           r.dev_decay_rate_fit <= 1e-10 && r.dev_min_radicand <= 1e-10 &&
           r.v_star_min > 0.0 && r.min_radicand > 0.0;
  return r;
}

}  // namespace hillspec
