#include "hillspec/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hillspec/bands.hpp"
#include "hillspec/embedder.hpp"
#include "hillspec/errors.hpp"
#include "hillspec/io_util.hpp"
#include "hillspec/potentials.hpp"
#include "hillspec/verifier.hpp"

namespace hillspec::cli {
namespace {

namespace iou = hillspec::ioutil;
using nlohmann::json;

std::string fmtg(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.8g", x);
  return buf;
}

void write_with_dirs(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  iou::write_file(path, text);
}

// malformed numbers in option values are usage errors, not domain failures
std::pair<double, double> parse_window(const std::string& s) {
  const auto parts = iou::split(s, ',');
  if (parts.size() != 2)
    throw ParseError("--window expects lo,hi (got '" + s + "')");
  double lo = 0.0, hi = 0.0;
  try {
    lo = iou::to_double(iou::trim(parts[0]), "window lo");
    hi = iou::to_double(iou::trim(parts[1]), "window hi");
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  if (!(lo < hi))
    throw ParseError("--window needs lo < hi (got '" + s + "')");
  return {lo, hi};
}

std::pair<int, int> parse_modes(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos)
    throw ParseError("--modes expects a..b (got '" + s + "')");
  long a = 0, b = 0;
  try {
    a = iou::to_long(iou::trim(s.substr(0, pos)), "modes lo");
    b = iou::to_long(iou::trim(s.substr(pos + 2)), "modes hi");
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  if (a > b) throw ParseError("--modes needs a <= b (got '" + s + "')");
  return {static_cast<int>(a), static_cast<int>(b)};
}

json interval_json(const Interval& b) {
  json arr = json::array();
  arr.push_back(b.lo);
  if (std::isinf(b.hi))
    arr.push_back("inf");  // band still open at the window top
  else
    arr.push_back(b.hi);
  return arr;
}

struct Args {
  std::string potential = "cos";
  std::string out = "./";
  std::string construction;
  std::string window_spec;
  std::string modes_spec = "-2..2";
  std::string bump_spec = "sech2";
  int m = 1;
  double lambda0 = 0.5;
  double beta = 1.0;
  double Z = 20.0;
  double Zmatch = 15.0;
  double h = 0.0;
  double tol = 1e-9;
  double eps = 1e-4;
  std::size_t n = 0;
  bool strict = false;
};

int cmd_discriminant(const Args& a) {
  const PeriodicPotential A = PeriodicPotential::parse(a.potential);
  const auto [lo, hi] = parse_window(a.window_spec);
  std::size_t n = a.n;
  if (n == 0)
    n = std::max<std::size_t>(
        201, static_cast<std::size_t>(std::ceil((hi - lo) * 500.0)) + 1);
  const DiscriminantScan scan =
      scan_discriminant(a.m, A, A.period(), lo, hi, n, a.h);

  std::ostringstream csv;
  csv << "lambda,gamma\n";
  for (std::size_t i = 0; i < scan.lambda.size(); ++i)
    csv << iou::fmt17(scan.lambda[i]) << ',' << iou::fmt17(scan.gamma[i])
        << '\n';
  const std::string path = a.out + "discriminant.csv";
  write_with_dirs(path, csv.str());

  const auto [gmin, gmax] =
      std::minmax_element(scan.gamma.begin(), scan.gamma.end());
  std::cout << "wrote " << path << " (" << scan.lambda.size()
            << " points, gamma in [" << fmtg(*gmin) << ", " << fmtg(*gmax)
            << "])\n";
  return 0;
}

int cmd_bands(const Args& a, bool m_given) {
  const PeriodicPotential A = PeriodicPotential::parse(a.potential);
  const auto [lo, hi] = parse_window(a.window_spec);
  auto [mode_lo, mode_hi] = parse_modes(a.modes_spec);
  if (m_given) mode_lo = mode_hi = a.m;

  const EssentialSpectrum spec = essential_spectrum(
      mode_lo, mode_hi, A, A.period(), lo, hi, a.tol, 2000.0, a.h);

  json doc;
  doc["window"] = {lo, hi};
  doc["modes"] = {mode_lo, mode_hi};
  doc["tol"] = a.tol;
  doc["spectra"] = json::array();
  for (const BandSpectrum& bs : spec.per_mode) {
    json entry;
    entry["mode"] = bs.m;
    entry["gamma_at_window_lo"] = bs.gamma_at_lo;
    entry["edges"] = bs.edges;
    entry["bands"] = json::array();
    for (const Interval& b : bs.bands) entry["bands"].push_back(interval_json(b));
    doc["spectra"].push_back(std::move(entry));
  }
  doc["union"] = json::array();
  for (const Interval& b : spec.bands) doc["union"].push_back(interval_json(b));

  const std::string path = a.out + "bands.json";
  write_with_dirs(path, doc.dump(2) + "\n");

  std::cout << "modes " << mode_lo << ".." << mode_hi << " on ["
            << fmtg(lo) << ", " << fmtg(hi) << "]: " << spec.bands.size()
            << " band(s) in the union\n";
  for (const Interval& b : spec.bands)
    std::cout << "  [" << fmtg(b.lo) << ", "
              << (std::isinf(b.hi) ? std::string("inf") : fmtg(b.hi)) << "]\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_embed(const Args& a) {
  const PeriodicPotential A = PeriodicPotential::parse(a.potential);
  ConstructOptions opt;
  opt.beta = a.beta;
  opt.Z = a.Z;
  if (a.h > 0.0) opt.h = a.h;
  opt.strict = a.strict;
  const EmbeddedConstruction c = construct(a.lambda0, a.m, A, opt);
  save_construction(c, a.out);

  std::cout << "alpha = " << fmtg(c.alpha) << " (tail gap decay rate)\n"
            << "residual_sup = " << fmtg(c.residual_sup) << " (sup |v*| = "
            << fmtg(c.v_star_sup) << ")\n"
            << "decay_rate_fit = " << fmtg(c.decay_rate_fit) << "\n"
            << "min_radicand = " << fmtg(c.min_radicand) << "\n"
            << "S form discrepancy = " << fmtg(c.s_form_discrepancy) << "\n"
            << "seam mismatch = " << fmtg(c.seam_mismatch) << "\n";
  if (c.threshold) {
    const ThresholdReport& t = *c.threshold;
    std::cout << "threshold: lambda0 "
              << (t.embedded ? "embedded in" : "NOT embedded in")
              << " the other modes' essential spectrum, nearest edge at "
              << "distance " << fmtg(t.distance_to_nearest_edge) << "\n";
    if (t.warning) {
      std::cout << "threshold WARNING: lambda0 within " << fmtg(1e-3)
                << " of a band edge:\n";
      for (const auto& [mode, edge] : t.offending_edges)
        std::cout << "  mode " << mode << " edge " << fmtg(edge) << "\n";
    }
  }
  std::cout << "wrote " << a.out << "construction.csv, " << a.out
            << "diagnostics.json\n";
  return 0;
}

int cmd_verify(const Args& a, bool out_given) {
  const PeriodicPotential tail = PeriodicPotential::parse(a.potential);
  const VerifyReport r = verify_construction(a.construction, tail);

  json doc;
  doc["alpha"] = r.alpha;
  doc["residual_sup"] = r.residual_sup;
  doc["decay_rate_fit"] = r.decay_rate_fit;
  doc["min_radicand"] = r.min_radicand;
  doc["dev_alpha"] = r.dev_alpha;
  doc["dev_residual_sup"] = r.dev_residual_sup;
  doc["dev_decay_rate_fit"] = r.dev_decay_rate_fit;
  doc["dev_min_radicand"] = r.dev_min_radicand;
  doc["v_star_min"] = r.v_star_min;
  doc["seam_mismatch"] = r.seam_mismatch;
  doc["pass"] = r.pass;

  const std::string prefix = out_given ? a.out : a.construction;
  const std::string path = prefix + "verify_report.json";
  write_with_dirs(path, doc.dump(2) + "\n");

  const double max_dev =
      std::max({r.dev_alpha, r.dev_residual_sup, r.dev_decay_rate_fit,
                r.dev_min_radicand});
  std::cout << "recomputed: alpha = " << fmtg(r.alpha) << ", residual_sup = "
            << fmtg(r.residual_sup) << ", decay_rate_fit = "
            << fmtg(r.decay_rate_fit) << ", min_radicand = "
            << fmtg(r.min_radicand) << "\n"
            << "max deviation from stored diagnostics = " << fmtg(max_dev)
            << "\n"
            << "verification " << (r.pass ? "PASS" : "FAIL") << "\n"
            << "wrote " << path << "\n";
  return r.pass ? 0 : 2;
}

int cmd_evans(const Args& a, bool m_given, bool h_given) {
  const PeriodicPotential tail = PeriodicPotential::parse(a.potential);
  const auto [lo, hi] = parse_window(a.window_spec);

  int m = a.m;
  AsymptoticPotential A = [&] {
    if (!a.construction.empty()) {
      const EmbeddedConstruction c = load_construction(a.construction, tail);
      if (!m_given) m = c.m;
      return c.potential();
    }
    // No construction: scan the unperturbed background. The core window is
    // one period of the tail on each side, so the seam is exact up to
    // spline interpolation error.
    const double p = tail.period();
    const std::size_t n = 2001;
    const double h = 2.0 * p / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i)
      vals[i] = tail(-p + h * static_cast<double>(i));
    return AsymptoticPotential(-p, h, std::move(vals), tail);
  }();

  MatchingOptions opt;
  opt.Z_match = a.Zmatch;
  if (h_given && a.h > 0.0) opt.h = a.h;
  if (a.n > 0) opt.n_lambda = a.n;
  const MatchingFunction mf = matching_function(A, m, lo, hi, opt);

  std::ostringstream csv;
  csv << "lambda,iota\n";
  for (std::size_t i = 0; i < mf.lambda.size(); ++i)
    csv << iou::fmt17(mf.lambda[i]) << ',' << iou::fmt17(mf.iota[i]) << '\n';
  const std::string csv_path = a.out + "iota.csv";
  write_with_dirs(csv_path, csv.str());

  json doc;
  doc["window"] = {lo, hi};
  doc["m"] = m;
  doc["Z_match_requested"] = a.Zmatch;
  doc["Z_match_used"] = mf.Z_match_used;
  doc["n_lambda"] = mf.lambda.size();
  doc["roots"] = mf.roots;
  const std::string json_path = a.out + "roots.json";
  write_with_dirs(json_path, doc.dump(2) + "\n");

  std::cout << "Z_match = " << fmtg(mf.Z_match_used) << " (requested "
            << fmtg(a.Zmatch) << ", whole periods)\n";
  if (mf.roots.empty()) {
    std::cout << "no matching roots in [" << fmtg(lo) << ", " << fmtg(hi)
              << "]\n";
  } else {
    std::cout << "roots:";
    for (double r : mf.roots) std::cout << ' ' << iou::fmt17(r);
    std::cout << "\n";
  }
  std::cout << "wrote " << csv_path << ", " << json_path << "\n";
  return 0;
}

int cmd_perturb(const Args& a) {
  const PeriodicPotential tail = PeriodicPotential::parse(a.potential);
  const EmbeddedConstruction c = load_construction(a.construction, tail);
  const LocalizedPerturbation B = LocalizedPerturbation::parse(a.bump_spec);

  MatchingOptions opt;
  opt.Z_match = a.Zmatch;
  if (a.n > 0) opt.n_lambda = a.n;
  const PerturbationCheck r = hellmann_feynman(c, B, a.eps, opt);

  json doc;
  doc["bump"] = r.bump;
  doc["eps"] = r.eps;
  doc["lambda0"] = c.lambda0;
  doc["m"] = c.m;
  doc["derivative_formula"] = r.derivative_formula;
  doc["derivative_tracked"] = r.derivative_tracked;
  doc["lambda_plus"] = r.lambda_plus;
  doc["lambda_minus"] = r.lambda_minus;
  doc["rel_discrepancy"] = r.rel_discrepancy;
  const std::string path = a.out + "perturb.json";
  write_with_dirs(path, doc.dump(2) + "\n");

  std::cout << "bump " << r.bump << ", eps = " << fmtg(r.eps) << "\n"
            << "d lambda / d eps (formula) = " << fmtg(r.derivative_formula)
            << "\n"
            << "d lambda / d eps (tracked) = " << fmtg(r.derivative_tracked)
            << "\n"
            << "relative discrepancy = " << fmtg(r.rel_discrepancy) << "\n"
            << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int run(std::vector<std::string> args) {
  CLI::App app{
      "Floquet spectra of Hill operators and asymptotically periodic "
      "backgrounds with an embedded eigenvalue",
      "hillspec"};
  app.require_subcommand(1);
  // --h is an integrator step here, so help loses its short flag.
  app.set_help_flag("--help", "print help");
  Args a;

  auto add_sub = [&](const char* name, const char* desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->set_help_flag("--help", "print help");
    return cmd;
  };

  auto add_potential = [&](CLI::App* cmd) {
    cmd->add_option("--potential", a.potential,
                    "periodic background: cos | const:<v>[:<p>] | "
                    "samples:<path>")
        ->capture_default_str();
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", a.out, "output path prefix")
        ->capture_default_str();
  };

  CLI::App* disc = add_sub(
      "discriminant", "sample the Floquet discriminant over a lambda window");
  add_potential(disc);
  add_out(disc);
  disc->add_option("--m", a.m, "angular mode")->capture_default_str();
  disc->add_option("--window", a.window_spec, "lambda window lo,hi")
      ->required();
  disc->add_option("--n", a.n, "sample count (0: auto)");
  disc->add_option("--h", a.h, "integrator step (0: period/1000)");

  CLI::App* bands = add_sub(
      "bands", "locate spectral bands for a range of modes");
  add_potential(bands);
  add_out(bands);
  auto* bands_m = bands->add_option("--m", a.m, "single mode (overrides --modes)");
  bands->add_option("--modes", a.modes_spec, "mode range a..b (use --modes=-2..2)")
      ->capture_default_str();
  bands->add_option("--window", a.window_spec, "lambda window lo,hi")
      ->required();
  bands->add_option("--tol", a.tol, "band edge tolerance")
      ->capture_default_str();
  bands->add_option("--h", a.h, "integrator step (0: period/1000)");

  CLI::App* embed = add_sub(
      "embed",
      "construct a background whose mode m carries a bound state at lambda0");
  add_potential(embed);
  add_out(embed);
  embed->add_option("--m", a.m, "angular mode")->capture_default_str();
  embed->add_option("--lambda0", a.lambda0, "prescribed eigenvalue")
      ->capture_default_str();
  embed->add_option("--beta", a.beta, "window steepness (must exceed alpha)")
      ->capture_default_str();
  embed->add_option("--Z", a.Z, "half width of the construction window")
      ->capture_default_str();
  embed->add_option("--h", a.h, "grid and integrator step (0: 2e-3)");
  embed->add_flag("--strict", a.strict,
                  "fail on threshold warnings or poor diagnostics");

  CLI::App* verify = add_sub(
      "verify", "recheck an emitted construction from its files alone");
  add_potential(verify);
  auto* verify_out =
      verify->add_option("--out", a.out, "report prefix (default: the "
                                         "construction prefix)");
  verify->add_option("--construction", a.construction,
                     "prefix of construction.csv / diagnostics.json")
      ->required();

  CLI::App* evans = add_sub(
      "evans", "scan the matching function iota(lambda) and report roots");
  add_potential(evans);
  add_out(evans);
  evans->add_option("--construction", a.construction,
                    "construction prefix (omit to scan the bare background)");
  auto* evans_m =
      evans->add_option("--m", a.m, "angular mode (default: from the "
                                    "construction, else 1)");
  evans->add_option("--window", a.window_spec, "lambda window lo,hi")
      ->required();
  evans->add_option("--Zmatch", a.Zmatch,
                    "matching half width, snapped to whole periods")
      ->capture_default_str();
  auto* evans_h = evans->add_option("--h", a.h, "integrator step");
  evans->add_option("--n", a.n, "lambda samples (0: 101)");

  CLI::App* perturb = add_sub(
      "perturb", "first order eigenvalue response to a localized bump");
  add_potential(perturb);
  add_out(perturb);
  perturb->add_option("--construction", a.construction,
                      "prefix of construction.csv / diagnostics.json")
      ->required();
  perturb->add_option("--B", a.bump_spec,
                      "bump: sech2[:<c>] | gauss[:<c>] | zero")
      ->capture_default_str();
  perturb->add_option("--eps", a.eps, "derivative step")
      ->capture_default_str();
  perturb->add_option("--Zmatch", a.Zmatch, "matching half width")
      ->capture_default_str();
  perturb->add_option("--n", a.n, "lambda samples per tracking scan (0: 101)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (app.got_subcommand(disc)) return cmd_discriminant(a);
    if (app.got_subcommand(bands)) return cmd_bands(a, bands_m->count() > 0);
    if (app.got_subcommand(embed)) return cmd_embed(a);
    if (app.got_subcommand(verify))
      return cmd_verify(a, verify_out->count() > 0);
    if (app.got_subcommand(evans))
      return cmd_evans(a, evans_m->count() > 0, evans_h->count() > 0);
    if (app.got_subcommand(perturb)) return cmd_perturb(a);
    std::cerr << "error: no command\n";
    return 64;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const AccuracyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args));
}

}  // namespace hillspec::cli
