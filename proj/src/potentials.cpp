#include "hillspec/potentials.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hillspec/errors.hpp"
#include "hillspec/io_util.hpp"

namespace hillspec {

namespace iou = ioutil;

PeriodicPotential PeriodicPotential::cosine() {
  PeriodicPotential p;
  p.kind_ = Kind::Cosine;
  p.period_ = 2.0 * std::numbers::pi;
  p.label_ = "cos";
  return p;
}

PeriodicPotential PeriodicPotential::constant(double value, double period) {
  if (!(period > 0.0))
    throw DomainError("constant potential: period must be positive");
  PeriodicPotential p;
  p.kind_ = Kind::Constant;
  p.period_ = period;
  p.constant_ = value;
  p.label_ = "const:" + iou::fmt17(value);
  return p;
}

PeriodicPotential PeriodicPotential::sampled(double period,
                                             std::vector<double> values) {
  if (!(period > 0.0))
    throw DomainError("sampled potential: period must be positive");
  if (values.size() < 3)
    throw DomainError("sampled potential: needs >= 3 samples");
  PeriodicPotential p;
  p.kind_ = Kind::Sampled;
  p.period_ = period;
  const double h = period / static_cast<double>(values.size());
  p.spline_ = CubicSpline(0.0, h, std::move(values),
                          CubicSpline::Boundary::Periodic);
  p.label_ = "samples";
  return p;
}

PeriodicPotential PeriodicPotential::parse(const std::string& spec) {
  const std::string s = iou::trim(spec);
  if (s == "cos") return cosine();
  if (s.rfind("const:", 0) == 0) {
    const auto parts = iou::split(s.substr(6), ':');
    if (parts.size() > 2)
      throw ParseError("potential spec '" + spec + "': too many fields");
    double value, period = 1.0;
    try {
      value = iou::to_double(parts[0], "constant value");
      if (parts.size() == 2) period = iou::to_double(parts[1], "period");
    } catch (const Error& e) {
      throw ParseError("potential spec '" + spec + "': " + e.what());
    }
    if (!(period > 0.0))
      throw ParseError("potential spec '" + spec + "': period must be > 0");
    return constant(value, period);
  }
  if (s.rfind("samples:", 0) == 0) return load_csv(s.substr(8));
  throw ParseError("unknown potential spec '" + spec +
                   "' (expected cos | const:<v>[:<p>] | samples:<path>)");
}

PeriodicPotential PeriodicPotential::load_csv(const std::string& path) {
  const std::string text = iou::read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw DomainError("sampled potential file is empty: " + path);
  // Header: "# period=<float> n=<int>"
  double period = 0.0;
  long n = -1;
  {
    std::istringstream hs(line);
    std::string tok;
    hs >> tok;
    if (tok != "#")
      throw DomainError(path + ": missing '# period=... n=...' header");
    while (hs >> tok) {
      if (tok.rfind("period=", 0) == 0)
        period = iou::to_double(tok.substr(7), "header period");
      else if (tok.rfind("n=", 0) == 0)
        n = iou::to_long(tok.substr(2), "header n");
      else
        throw DomainError(path + ": unexpected header token '" + tok + "'");
    }
  }
  if (!(period > 0.0)) throw DomainError(path + ": header period must be > 0");
  if (n < 3) throw DomainError(path + ": header n must be >= 3");
  std::vector<double> z, v;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (iou::trim(line).empty()) continue;
    const auto cells = iou::split(line, ',');
    if (cells.size() != 2)
      throw DomainError(path + ":" + std::to_string(lineno) +
                        ": expected 'z,value'");
    z.push_back(iou::to_double(cells[0], "z"));
    v.push_back(iou::to_double(cells[1], "value"));
  }
  if (static_cast<long>(v.size()) != n)
    throw DomainError(path + ": header says n=" + std::to_string(n) +
                      " but found " + std::to_string(v.size()) + " rows");
  const double h = period / static_cast<double>(n);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double want = static_cast<double>(i) * h;
    if (std::fabs(z[i] - want) > 1e-9 * period)
      throw DomainError(path + ": grid is not uniform on [0, period) at row " +
                        std::to_string(i + 2));
  }
  return sampled(period, std::move(v));
}

void PeriodicPotential::save_csv(const std::string& path) const {
  const PeriodicPotential* src = this;
  PeriodicPotential tmp;
  if (kind_ != Kind::Sampled) {
    tmp = to_sampled(1024);
    src = &tmp;
  }
  const std::vector<double>& v = src->spline_.values();
  std::ostringstream out;
  out << "# period=" << iou::fmt17(src->period_) << " n=" << v.size() << "\n";
  const double h = src->period_ / static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out << iou::fmt17(static_cast<double>(i) * h) << ","
        << iou::fmt17(v[i]) << "\n";
  iou::write_file(path, out.str());
}

PeriodicPotential PeriodicPotential::to_sampled(std::size_t n) const {
  if (n < 3) throw DomainError("to_sampled: needs n >= 3");
  std::vector<double> v(n);
  const double h = period_ / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = (*this)(static_cast<double>(i) * h);
  return sampled(period_, std::move(v));
}

double PeriodicPotential::operator()(double z) const {
  switch (kind_) {
    case Kind::Cosine:
      return std::cos(z);
    case Kind::Constant:
      return constant_;
    case Kind::Sampled:
      return spline_.eval(z);
  }
  return 0.0;
}

bool PeriodicPotential::flip_symmetric() const {
  switch (kind_) {
    case Kind::Cosine:
      return true;
    case Kind::Constant:
      return constant_ == 0.0;
    case Kind::Sampled: {
      const std::vector<double>& v = spline_.values();
      const std::size_t n = v.size();
      if (n % 2 != 0) return false;
      double scale = 0.0;
      for (double x : v) scale = std::max(scale, std::fabs(x));
      if (scale == 0.0) return true;
      for (std::size_t i = 0; i < n; ++i)
        if (std::fabs(v[(i + n / 2) % n] + v[i]) > 1e-12 * scale) return false;
      return true;
    }
  }
  return false;
}

LocalizedPerturbation::LocalizedPerturbation(std::function<double(double)> f,
                                             double e, std::string label)
    : f_(std::move(f)), decay_exponent_(e), label_(std::move(label)) {
  if (!(decay_exponent_ > 1.0))
    throw DomainError("localized perturbation: decay exponent must be > 1");
}

LocalizedPerturbation LocalizedPerturbation::sech2(double center) {
  return LocalizedPerturbation(
      [center](double z) {
        const double c = std::cosh(z - center);
        return 1.0 / (c * c);
      },
      2.0, center == 0.0 ? "sech2" : "sech2:" + iou::fmt17(center));
}

LocalizedPerturbation LocalizedPerturbation::gaussian(double center) {
  return LocalizedPerturbation(
      [center](double z) {
        const double u = z - center;
        return std::exp(-0.5 * u * u);
      },
      2.0, center == 0.0 ? "gauss" : "gauss:" + iou::fmt17(center));
}

LocalizedPerturbation LocalizedPerturbation::zero() {
  return LocalizedPerturbation([](double) { return 0.0; }, 2.0, "zero");
}

LocalizedPerturbation LocalizedPerturbation::parse(const std::string& spec) {
  const std::string s = iou::trim(spec);
  if (s == "zero") return zero();
  const auto parts = iou::split(s, ':');
  double center = 0.0;
  if (parts.size() == 2) {
    try {
      center = iou::to_double(parts[1], "bump center");
    } catch (const Error& e) {
      throw ParseError("perturbation spec '" + spec + "': " + e.what());
    }
  } else if (parts.size() > 2) {
    throw ParseError("perturbation spec '" + spec + "': too many fields");
  }
  if (parts[0] == "sech2") return sech2(center);
  if (parts[0] == "gauss") return gaussian(center);
  throw ParseError("unknown perturbation spec '" + spec +
                   "' (expected sech2[:<c>] | gauss[:<c>] | zero)");
}

LocalizedPerturbation LocalizedPerturbation::from_function(
    std::function<double(double)> f, double decay_exponent,
    std::string label) {
  return LocalizedPerturbation(std::move(f), decay_exponent,
                               std::move(label));
}

AsymptoticPotential::AsymptoticPotential(double z_lo, double h,
                                         std::vector<double> values,
                                         PeriodicPotential tail)
    : z_lo_(z_lo),
      z_hi_(z_lo + h * static_cast<double>(values.size() - 1)),
      core_(z_lo, h, std::move(values), CubicSpline::Boundary::NotAKnot),
      tail_(std::move(tail)) {}

AsymptoticPotential AsymptoticPotential::from_grid(
    const std::vector<double>& z, std::vector<double> values,
    PeriodicPotential tail) {
  if (z.size() < 4)
    throw DomainError("asymptotic potential: needs >= 4 grid points");
  if (z.size() != values.size())
    throw DomainError("asymptotic potential: grid/value size mismatch");
  const double h = z[1] - z[0];
  if (!(h > 0.0)) throw DomainError("asymptotic potential: grid not ascending");
  const double span = z.back() - z.front();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double want = z.front() + static_cast<double>(i) * h;
    if (std::fabs(z[i] - want) > 1e-9 * std::max(1.0, std::fabs(span)))
      throw DomainError("asymptotic potential: grid is not uniform at index " +
                        std::to_string(i));
  }
  return AsymptoticPotential(z.front(), h, std::move(values),
                             std::move(tail));
}

double AsymptoticPotential::operator()(double z) const {
  if (z < z_lo_ || z > z_hi_) return tail_(z);
  return core_.eval(z);
}

double AsymptoticPotential::seam_mismatch() const {
  return std::max(std::fabs(core_.eval(z_lo_) - tail_(z_lo_)),
                  std::fabs(core_.eval(z_hi_) - tail_(z_hi_)));
}

AsymptoticPotential AsymptoticPotential::perturbed(
    const LocalizedPerturbation& B, double eps) const {
  const double edge =
      std::max(std::fabs(B(z_lo_)), std::fabs(B(z_hi_)));
  if (edge > 1e-8)
    throw DomainError(
        "perturbation is not negligible at the window edges (|B| = " +
        iou::fmt17(edge) + ")");
  const std::vector<double>& v = core_.values();
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double z = z_lo_ + core_.h() * static_cast<double>(i);
    w[i] = v[i] + eps * B(z);
  }
  return AsymptoticPotential(z_lo_, core_.h(), std::move(w), tail_);
}

ModeCoefficient::ModeCoefficient(int m, const PeriodicPotential& A,
                                 double lambda)
    : m_(m), lambda_(lambda), period_(A.period()), a_(A) {
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
}

ModeCoefficient::ModeCoefficient(int m, const AsymptoticPotential& A,
                                 double lambda)
    : m_(m), lambda_(lambda), period_(std::nullopt), a_(A) {
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
}

}  // namespace hillspec
