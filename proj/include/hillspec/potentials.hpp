// Background potentials and mode coefficients.
//
// The operators under study are angular Fourier modes of a magnetic
// Laplacian on an infinite cylinder; mode m with magnetic potential A(z)
// reduces to the half-line-free Hill form
//
//     -v'' + Q(z) v = 0,      Q(z) = (m + A(z))^2 - lambda.
//
// PeriodicPotential models the asymptotic background A_per, either closed
// form (cosine, constant) or a sampled grid interpolated by a periodic
// cubic spline. AsymptoticPotential models a compactly supported spline
// modification glued to periodic tails. ModeCoefficient bundles (m, A,
// lambda) into the coefficient Q.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hillspec/numerics.hpp"

namespace hillspec {

class PeriodicPotential {
 public:
  enum class Kind { Cosine, Constant, Sampled };

  // Zero background with unit period.
  PeriodicPotential() = default;

  // cos z with period 2*pi.
  static PeriodicPotential cosine();
  static PeriodicPotential constant(double value, double period = 1.0);
  // Uniform samples of one period: values[i] = A(i * period / n).
  static PeriodicPotential sampled(double period, std::vector<double> values);

  // Spec grammar: "cos" | "const:<v>[:<period>]" | "samples:<path>".
  static PeriodicPotential parse(const std::string& spec);

  // Sampled-grid CSV: "# period=<float> n=<int>" then "z,value" rows.
  static PeriodicPotential load_csv(const std::string& path);
  void save_csv(const std::string& path) const;
  PeriodicPotential to_sampled(std::size_t n) const;

  double operator()(double z) const;
  double period() const { return period_; }
  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  // True when A(z + period/2) = -A(z); lets mode m stand in for mode -m.
  bool flip_symmetric() const;

 private:
  Kind kind_ = Kind::Constant;
  double period_ = 1.0;
  double constant_ = 0.0;
  CubicSpline spline_;
  std::string label_;
};

// Localized bump B(z) used to perturb a background; carries the exponent of
// its algebraic decay bound |B(z)| <= C (1+|z|)^{-e}, e > 1.
class LocalizedPerturbation {
 public:
  static LocalizedPerturbation sech2(double center = 0.0);
  static LocalizedPerturbation gaussian(double center = 0.0);
  static LocalizedPerturbation zero();
  // Spec grammar: "sech2[:<center>]" | "gauss[:<center>]" | "zero".
  static LocalizedPerturbation parse(const std::string& spec);
  static LocalizedPerturbation from_function(std::function<double(double)> f,
                                             double decay_exponent,
                                             std::string label = "custom");

  double operator()(double z) const { return f_(z); }
  double decay_exponent() const { return decay_exponent_; }
  const std::string& label() const { return label_; }

 private:
  LocalizedPerturbation(std::function<double(double)> f, double e,
                        std::string label);
  std::function<double(double)> f_;
  double decay_exponent_ = 2.0;
  std::string label_;
};

// A(z): cubic spline through uniform samples on [z_lo, z_hi], periodic tail
// outside. The seam mismatch |spline(z_edge) - tail(z_edge)| is recorded but
// not forbidden; constructions keep it at round-off scale.
class AsymptoticPotential {
 public:
  AsymptoticPotential(double z_lo, double h, std::vector<double> values,
                      PeriodicPotential tail);
  // Validates that z is a uniform ascending grid.
  static AsymptoticPotential from_grid(const std::vector<double>& z,
                                       std::vector<double> values,
                                       PeriodicPotential tail);

  double operator()(double z) const;
  double z_lo() const { return z_lo_; }
  double z_hi() const { return z_hi_; }
  const PeriodicPotential& tail() const { return tail_; }
  const CubicSpline& core() const { return core_; }
  double seam_mismatch() const;

  // Same tail, values shifted by eps * B on the grid. B must be negligible
  // at the window edges.
  AsymptoticPotential perturbed(const LocalizedPerturbation& B,
                                double eps) const;

 private:
  double z_lo_, z_hi_;
  CubicSpline core_;
  PeriodicPotential tail_;
};

// Q(z) = (m + A(z))^2 - lambda for one angular mode.
class ModeCoefficient {
 public:
  ModeCoefficient(int m, const PeriodicPotential& A, double lambda);
  ModeCoefficient(int m, const AsymptoticPotential& A, double lambda);

  double q(double z) const {
    const double s = static_cast<double>(m_) + a_(z);
    return s * s - lambda_;
  }
  double a(double z) const { return a_(z); }
  int m() const { return m_; }
  double lambda() const { return lambda_; }
  // Period of Q when the potential is periodic; empty otherwise.
  std::optional<double> period() const { return period_; }

 private:
  int m_;
  double lambda_;
  std::optional<double> period_;
  std::function<double(double)> a_;
};

}  // namespace hillspec
