#include "doctest.h"

#include "hillspec/embedder.hpp"
#include "hillspec/errors.hpp"
#include "hillspec/io_util.hpp"
#include "hillspec/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

using namespace hillspec;
namespace iou = hillspec::ioutil;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto p = fs::temp_directory_path() / "hillspec_tests" / "embed";
  fs::create_directories(p);
  return p;
}

// shared across the expensive assertions below; built once
const EmbeddedConstruction& default_construction() {
  static EmbeddedConstruction c = construct(0.5, 1, PeriodicPotential::cosine());
  return c;
}

} // namespace

TEST_CASE("constant background reproduces the closed-form construction") {
  // (m + 0)^2 - lambda0 = 0.04, so f+- = e^{+-0.2 z} exactly and every
  // quantity below has a hand-computable value.
  const double alpha = 0.2, beta = 1.5;
  auto A = PeriodicPotential::constant(0.0, 1.0);
  ConstructOptions opt;
  opt.beta = beta;
  opt.Z = 6.0;
  auto c = construct(0.96, 1, A, opt);

  CHECK(std::fabs(c.alpha - alpha) <= 1e-9);
  REQUIRE(c.z.size() == c.v_star.size());

  for (std::size_t i = 0; i < c.z.size(); i += 37) {
    const double z = c.z[i];
    const double wp = 0.5 * (1.0 - std::tanh(beta * z));
    const double wm = 0.5 * (1.0 + std::tanh(beta * z));
    const double direct = wp * std::exp(alpha * z) + wm * std::exp(-alpha * z);
    CHECK(std::fabs(c.v_star[i] - direct) <= 1e-9);
  }

  // S(0) = -2 alpha beta from the window-commutator form
  const std::size_t mid = c.z.size() / 2;
  REQUIRE(std::fabs(c.z[mid]) <= 1e-12);
  CHECK(std::fabs(c.S[mid] + 2.0 * alpha * beta) <= 1e-8);
  CHECK(std::fabs(c.A0[mid] - (-1.0 + std::sqrt(1.0 - 2.0 * alpha * beta))) <= 1e-8);
  CHECK(std::fabs(c.min_radicand - (1.0 - 2.0 * alpha * beta)) <= 1e-2);

  CHECK(std::fabs(c.decay_rate_fit - alpha) <= 1e-4);
  CHECK(c.residual_sup <= 1e-6 * c.v_star_sup);
  CHECK(c.s_form_discrepancy <= 1e-10);
  CHECK(c.eigenfunction_positive);
  CHECK(std::fabs(c.v_star_sup - 1.0) <= 1e-9);

  // embedded via the m = 0 band [0, inf); nearest foreign edge is m = +-1 at 1
  REQUIRE(c.threshold.has_value());
  CHECK(c.threshold->embedded);
  CHECK_FALSE(c.threshold->warning);
  CHECK(std::fabs(c.threshold->distance_to_nearest_edge - 0.04) <= 1e-5);
}

TEST_CASE("identically constant Floquet pair gives a vanishing defect") {
  // m = 1, A = 0, lambda0 = 1 makes the coefficient vanish, so f = 1 solves
  // the equation; the window then reassembles 1 and S must collapse to 0.
  auto A = PeriodicPotential::constant(0.0, 1.0);
  const double h = 1e-2;
  std::vector<double> z, one, zero;
  for (int i = -400; i <= 400; ++i) {
    z.push_back(h * i);
    one.push_back(1.0);
    zero.push_back(0.0);
  }
  FloquetSolution fp, fm;
  fp.rho = 1.0;
  fp.alpha_abs = 0.0;
  fp.decays_at_plus_infinity = false;
  fp.traj = Trajectory::from_nodes(z, one, zero, zero);
  fm = fp;
  fm.decays_at_plus_infinity = true;

  auto v = build_v_star(fp, fm, 2.0);
  REQUIRE(v.size() == z.size());
  for (double vi : v) CHECK(std::fabs(vi - 1.0) <= 1e-12);

  auto sp = build_S(fp, fm, 2.0, v, 1, A, 1.0);
  for (double s : sp.S) CHECK(std::fabs(s) <= 1e-12);
  CHECK(sp.form_discrepancy <= 1e-12);

  auto a0 = build_A0(z, sp.S, 1, A);
  CHECK(std::fabs(a0.min_radicand - 1.0) <= 1e-12);
  for (double a : a0.A0) CHECK(std::fabs(a) <= 1e-12);
}

TEST_CASE("misordered pair and negative radicand are rejected") {
  auto A = PeriodicPotential::constant(0.0, 1.0);
  auto [fp, fm] = decaying_solutions(ModeCoefficient(1, A, 0.96), 1.0, 2.0, 1e-2);
  CHECK_THROWS_AS(build_v_star(fm, fp, 1.5), DomainError);

  std::vector<double> z = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> S(z.size(), -2.0); // (1 + 0)^2 - 2 < 0
  CHECK_THROWS_AS(build_A0(z, S, 1, A), DomainError);
}

TEST_CASE("cosine construction diagnostics stay on their pinned values") {
  const auto& c = default_construction();

  CHECK(c.lambda0 == 0.5);
  CHECK(c.m == 1);
  CHECK(std::fabs(c.alpha - 0.5835428305) <= 1e-6);

  REQUIRE(c.z.size() == 20001);
  CHECK(std::fabs(c.z.front() + 20.0) <= 1e-12);
  CHECK(std::fabs(c.z.back() - 20.0) <= 1e-12);

  CHECK(c.residual_sup <= 1e-9);
  CHECK(c.residual_sup <= 1e-6 * c.v_star_sup);
  CHECK(std::fabs(c.v_star_sup - 1.0158522) <= 1e-4);
  CHECK(c.min_radicand > 7.4e-6);
  CHECK(c.min_radicand < 7.7e-6);
  CHECK(c.s_form_discrepancy <= 1e-12);
  CHECK(c.seam_mismatch <= 1e-6);
  CHECK(c.eigenfunction_positive);
  CHECK(std::fabs(c.a2_integral) > 1e-4);

  CHECK(std::fabs(c.decay_rate_fit - c.alpha) <= 0.02);
  CHECK(std::fabs(c.decay_rate_fit - 0.5835440) <= 1e-4);

  REQUIRE(c.threshold.has_value());
  CHECK(c.threshold->embedded);
  CHECK_FALSE(c.threshold->warning);
  CHECK(std::fabs(c.threshold->distance_to_nearest_edge - 0.0310395) <= 1e-4);

  // glued potential: core values in the window, periodic tail outside
  auto pot = c.potential();
  const std::size_t mid = c.z.size() / 2;
  CHECK(std::fabs(pot(0.0) - c.A0[mid]) <= 1e-9);
  CHECK(pot(25.0) == PeriodicPotential::cosine()(25.0));
}

TEST_CASE("defect and defect times eigenfunction decay at their own rates") {
  // v* ~ e^{-alpha |z|} while S ~ e^{-2(beta - alpha)|z|}: the product of
  // the window cutoff e^{-2 beta |z|} with the growing branch e^{+alpha |z|}
  // it suppresses, divided by v*.  S v* decays like e^{-(2 beta - alpha)|z|}.
  const auto& c = default_construction();
  const double beta = c.beta, alpha = c.alpha;
  const double p = PeriodicPotential::cosine().period();

  const double rate_S =
      fit_decay_rate(c.z.front(), c.z[1] - c.z[0], c.S, 10.0, 20.0, p);
  CHECK(std::fabs(rate_S - 2.0 * (beta - alpha)) <= 0.02);

  std::vector<double> sv(c.S.size());
  for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = c.S[i] * c.v_star[i];
  const double rate_sv =
      fit_decay_rate(c.z.front(), c.z[1] - c.z[0], sv, 10.0, 20.0, p);
  CHECK(std::fabs(rate_sv - (2.0 * beta - alpha)) <= 0.02);
}

TEST_CASE("construction is independent of the window half-width") {
  ConstructOptions opt;
  opt.h = 4e-3;
  opt.threshold_check = false;
  opt.Z = 20.0;
  auto c20 = construct(0.5, 1, PeriodicPotential::cosine(), opt);
  opt.Z = 24.0;
  auto c24 = construct(0.5, 1, PeriodicPotential::cosine(), opt);

  const std::size_t off = 1000; // (24 - 20) / 4e-3
  REQUIRE(c24.z.size() == c20.z.size() + 2 * off);
  double dv = 0.0, da = 0.0;
  for (std::size_t i = 0; i < c20.z.size(); ++i) {
    REQUIRE(std::fabs(c24.z[i + off] - c20.z[i]) <= 1e-9);
    dv = std::max(dv, std::fabs(c24.v_star[i + off] - c20.v_star[i]));
    da = std::max(da, std::fabs(c24.A0[i + off] - c20.A0[i]));
  }
  CHECK(dv <= 1e-7);
  CHECK(da <= 1e-8);
}

TEST_CASE("strict mode promotes a non-embedded candidate to an error") {
  // scanning only the candidate's own mode leaves nothing to embed into
  auto A = PeriodicPotential::constant(0.0, 1.0);
  ConstructOptions opt;
  opt.Z = 10.0;
  opt.h = 4e-3;
  opt.threshold_mode_lo = 2;
  opt.threshold_mode_hi = 2;

  auto c = construct(3.75, 2, A, opt);
  REQUIRE(c.threshold.has_value());
  CHECK_FALSE(c.threshold->embedded);

  opt.strict = true;
  CHECK_THROWS_AS(construct(3.75, 2, A, opt), DomainError);
}

TEST_CASE("a gap point too deep for the correction is rejected") {
  // at 0.3 the decay rate is ~0.73, so S(0) ~ -2 alpha beta drives the
  // radicand (1 + cos z)^2 + S negative near the zeros of 1 + cos z
  ConstructOptions opt;
  opt.Z = 6.0;
  opt.h = 4e-3;
  opt.threshold_check = false;
  CHECK_THROWS_AS(construct(0.3, 1, PeriodicPotential::cosine(), opt),
                  DomainError);
}

TEST_CASE("band interior and undersized window rate are rejected") {
  ConstructOptions opt;
  opt.Z = 6.0;
  opt.h = 4e-3;
  opt.threshold_check = false;
  CHECK_THROWS_AS(construct(0.568, 1, PeriodicPotential::cosine(), opt),
                  DomainError);

  opt.beta = 0.5; // below the Floquet rate 0.5835; v* would not decay
  CHECK_THROWS_AS(construct(0.5, 1, PeriodicPotential::cosine(), opt),
                  DomainError);
}

TEST_CASE("save, load and verify round trip bit-exactly") {
  ConstructOptions opt;
  opt.Z = 8.0;
  opt.h = 4e-3;
  opt.threshold_check = false;
  auto c = construct(0.5, 1, PeriodicPotential::cosine(), opt);

  const std::string prefix = (temp_dir() / "rt" / "nested" / "run_").string();
  save_construction(c, prefix);
  CHECK(fs::exists(prefix + "construction.csv"));
  CHECK(fs::exists(prefix + "diagnostics.json"));

  auto r = load_construction(prefix, PeriodicPotential::cosine());
  REQUIRE(r.z.size() == c.z.size());
  for (std::size_t i = 0; i < c.z.size(); ++i) {
    CHECK(r.z[i] == c.z[i]);
    CHECK(r.v_star[i] == c.v_star[i]);
    CHECK(r.S[i] == c.S[i]);
    CHECK(r.A0[i] == c.A0[i]);
    CHECK(r.A_per[i] == c.A_per[i]);
  }
  CHECK(r.lambda0 == c.lambda0);
  CHECK(r.m == c.m);
  CHECK(r.beta == c.beta);
  CHECK(r.alpha == c.alpha);
  CHECK(r.residual_sup == c.residual_sup);
  CHECK(r.min_radicand == c.min_radicand);
  CHECK(r.decay_rate_fit == c.decay_rate_fit);
  CHECK(std::isnan(r.s_form_discrepancy)); // needs the pair, not stored
  CHECK_FALSE(r.threshold.has_value());
  CHECK(r.eigenfunction_positive);

  auto rep = verify_construction(prefix, PeriodicPotential::cosine());
  CHECK(rep.pass);
  CHECK(rep.dev_alpha <= 1e-10);
  CHECK(rep.dev_residual_sup <= 1e-10);
  CHECK(rep.dev_decay_rate_fit <= 1e-10);
  CHECK(rep.dev_min_radicand <= 1e-10);
  CHECK(rep.v_star_min > 0.0);
}

TEST_CASE("verification detects a tampered sample") {
  const std::string prefix = (temp_dir() / "tamper" / "run_").string();
  {
    ConstructOptions opt;
    opt.Z = 8.0;
    opt.h = 4e-3;
    opt.threshold_check = false;
    save_construction(construct(0.5, 1, PeriodicPotential::cosine(), opt),
                      prefix);
  }
  REQUIRE(verify_construction(prefix, PeriodicPotential::cosine()).pass);

  auto lines = iou::split(iou::read_file(prefix + "construction.csv"), '\n');
  const std::size_t row = lines.size() / 2;
  auto cells = iou::split(lines[row], ',');
  REQUIRE(cells.size() == 5);
  cells[1] = iou::fmt17(iou::to_double(cells[1], "v_star") * 1.001);
  lines[row] = cells[0] + "," + cells[1] + "," + cells[2] + "," + cells[3] +
               "," + cells[4];
  std::string joined;
  for (const auto& l : lines) {
    joined += l;
    joined += '\n';
  }
  iou::write_file(prefix + "construction.csv", joined);

  auto rep = verify_construction(prefix, PeriodicPotential::cosine());
  CHECK_FALSE(rep.pass);
  CHECK(rep.dev_residual_sup > 1e-10);
}
