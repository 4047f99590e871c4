#include "hillspec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hillspec/errors.hpp"

namespace hillspec {

namespace {

// Tridiagonal solve (Thomas), diagonals (a: sub, b: diag, c: super).
std::vector<double> solve_tridiag(std::vector<double> a, std::vector<double> b,
                                  std::vector<double> c,
                                  std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

// Cyclic tridiagonal with constant diagonals (sub = super = off, diag) via
// Sherman-Morrison.
std::vector<double> solve_cyclic(double diag, double off,
                                 const std::vector<double>& d) {
  const std::size_t n = d.size();
  const double gamma = -diag;
  std::vector<double> a(n, off), b(n, diag), c(n, off);
  b[0] -= gamma;
  b[n - 1] -= off * off / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = off;
  std::vector<double> x = solve_tridiag(a, b, c, d);
  std::vector<double> q = solve_tridiag(a, b, c, u);
  const double fact =
      (x[0] + off * x[n - 1] / gamma) / (1.0 + q[0] + off * q[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * q[i];
  return x;
}

}  // namespace

CubicSpline::CubicSpline(double x0, double h, std::vector<double> y,
                         Boundary bc)
    : x0_(x0), h_(h), y_(std::move(y)), bc_(bc) {
  const std::size_t n = y_.size();
  if (h_ <= 0.0) throw DomainError("spline: grid spacing must be positive");
  if (bc_ == Boundary::Periodic) {
    if (n < 3) throw DomainError("spline: periodic fit needs >= 3 samples");
    // M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i-1} - 2 y_i + y_{i+1}) / h^2, cyclic.
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ym = y_[(i + n - 1) % n], yp = y_[(i + 1) % n];
      d[i] = 6.0 * (ym - 2.0 * y_[i] + yp) / (h_ * h_);
    }
    m_ = solve_cyclic(4.0, 1.0, d);
  } else {
    if (n < 4) throw DomainError("spline: not-a-knot fit needs >= 4 samples");
    // Interior rows for M_1..M_{n-2}; not-a-knot end rows eliminate M_0 and
    // M_{n-1} via M_0 = 2 M_1 - M_2 (and mirrored).
    const std::size_t k = n - 2;
    std::vector<double> a(k, 1.0), b(k, 4.0), c(k, 1.0), d(k);
    for (std::size_t i = 1; i + 1 < n; ++i)
      d[i - 1] = 6.0 * (y_[i - 1] - 2.0 * y_[i] + y_[i + 1]) / (h_ * h_);
    b[0] = 6.0;
    c[0] = 0.0;
    b[k - 1] = 6.0;
    a[k - 1] = 0.0;
    std::vector<double> mi = solve_tridiag(a, b, c, d);
    m_.assign(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) m_[i + 1] = mi[i];
    m_[0] = 2.0 * m_[1] - m_[2];
    m_[n - 1] = 2.0 * m_[n - 2] - m_[n - 3];
  }
}

double CubicSpline::span() const {
  return bc_ == Boundary::Periodic ? h_ * static_cast<double>(y_.size())
                                   : h_ * static_cast<double>(y_.size() - 1);
}

void CubicSpline::locate(double x, std::size_t& i, double& dx) const {
  const std::size_t n = y_.size();
  double t = x - x0_;
  if (bc_ == Boundary::Periodic) {
    const double p = span();
    t -= p * std::floor(t / p);
    if (t >= p) t = 0.0;  // guards the floor landing exactly on p
    i = static_cast<std::size_t>(t / h_);
    if (i >= n) i = n - 1;
  } else {
    if (t <= 0.0) t = 0.0;
    const double tmax = span();
    if (t >= tmax) t = tmax;
    i = static_cast<std::size_t>(t / h_);
    if (i >= n - 1) i = n - 2;
  }
  dx = t - static_cast<double>(i) * h_;
}

double CubicSpline::eval(double x) const {
  std::size_t i;
  double dx;
  locate(x, i, dx);
  const std::size_t n = y_.size();
  const std::size_t j = (bc_ == Boundary::Periodic) ? (i + 1) % n : i + 1;
  const double A = (h_ - dx) / h_, B = dx / h_;
  return A * y_[i] + B * y_[j] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[j]) * h_ * h_ / 6.0;
}

double CubicSpline::deriv(double x) const {
  std::size_t i;
  double dx;
  locate(x, i, dx);
  const std::size_t n = y_.size();
  const std::size_t j = (bc_ == Boundary::Periodic) ? (i + 1) % n : i + 1;
  const double A = (h_ - dx) / h_, B = dx / h_;
  return (y_[j] - y_[i]) / h_ +
         ((3.0 * B * B - 1.0) * m_[j] - (3.0 * A * A - 1.0) * m_[i]) * h_ /
             6.0;
}

double simpson(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  if (n < 3) throw DomainError("simpson: needs >= 3 samples");
  std::size_t last = n - 1;
  double tail = 0.0;
  if (last % 2 != 0) {
    // 3/8 rule on the final three panels keeps fourth-order accuracy.
    if (n < 4) throw DomainError("simpson: odd panel count needs >= 4");
    last = n - 4;
    tail = 3.0 * h / 8.0 *
           (y[n - 4] + 3.0 * y[n - 3] + 3.0 * y[n - 2] + y[n - 1]);
  }
  double s = y[0] + y[last];
  for (std::size_t i = 1; i < last; i += 2) s += 4.0 * y[i];
  for (std::size_t i = 2; i < last; i += 2) s += 2.0 * y[i];
  return s * h / 3.0 + tail;
}

double median(std::vector<double> v) {
  if (v.empty()) throw DomainError("median of empty sequence");
  const std::size_t k = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k),
                   v.end());
  double hi = v[k];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                   v.begin() + static_cast<std::ptrdiff_t>(k));
  return 0.5 * (v[k - 1] + hi);
}

double bisect(const std::function<double(double)>& f, double a, double b,
              double fa, double fb, double xtol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw DomainError("bisect: endpoints do not bracket a sign change");
  for (int it = 0; it < 200 && (b - a) > xtol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double fit_decay_rate(double z0, double h, const std::vector<double>& y,
                      double lo, double hi, double period) {
  if (period <= 0.0) throw DomainError("decay fit: period must be positive");
  const std::size_t n = y.size();
  if (n < 8) throw DomainError("decay fit: too few samples");
  std::vector<double> rates;
  for (std::size_t j = 0; j < n; ++j) {
    const double z = z0 + static_cast<double>(j) * h;
    if (z < lo) continue;
    const double zt = z + period;
    if (zt > hi) break;
    // |y| at z + period via 4-point Lagrange interpolation on neighbors.
    const double s = (zt - z0) / h;
    std::size_t k = static_cast<std::size_t>(s);
    if (k == 0) k = 1;
    if (k + 2 >= n) continue;
    const std::size_t base = k - 1;
    double val = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
      double L = 1.0;
      const double za = static_cast<double>(base + a);
      for (std::size_t b = 0; b < 4; ++b) {
        if (a == b) continue;
        const double zb = static_cast<double>(base + b);
        L *= (s - zb) / (za - zb);
      }
      val += L * y[base + a];
    }
    const double num = std::fabs(y[j]), den = std::fabs(val);
    if (num < 1e-280 || den < 1e-280) continue;
    rates.push_back(std::log(num / den) / period);
  }
  if (rates.size() < 8)
    throw DomainError("decay fit: window too short for the given period");
  return median(std::move(rates));
}

std::vector<Interval> merge_intervals(std::vector<Interval> v,
                                      double gap_tol) {
  if (v.empty()) return v;
  std::sort(v.begin(), v.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  out.push_back(v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    Interval& last = out.back();
    if (v[i].lo <= last.hi + gap_tol)
      last.hi = std::max(last.hi, v[i].hi);
    else
      out.push_back(v[i]);
  }
  return out;
}

}  // namespace hillspec
