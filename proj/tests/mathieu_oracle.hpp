// Independent Mathieu characteristic values for the m = 0 cosine mode.
//
// With A(z) = cos z the m = 0 coefficient is Q = cos^2 z - lambda =
// 1/2 + (1/2) cos 2z - lambda, so -v'' + Q v = 0 is Mathieu's equation
// v'' + (a - 2 q cos 2z) v = 0 with q = 1/4 and a = lambda - 1/2. The first
// band of the m = 0 operator is therefore [a0(q) + 1/2, b1(q) + 1/2] and the
// second starts at a1(q) + 1/2.
//
// Characteristic values come from the standard Fourier truncation: each
// symmetry class gives a symmetric tridiagonal matrix whose smallest
// eigenvalue is found by Sturm-count bisection. No dependence on the library
// under test.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mathieu {

// Number of eigenvalues of the symmetric tridiagonal (diag d, offdiag e)
// strictly below x, by the classic Sturm pivot recurrence.
inline int count_below(const std::vector<double>& d,
                       const std::vector<double>& e, double x) {
  int count = 0;
  double t = d[0] - x;
  if (t < 0.0) ++count;
  for (std::size_t i = 1; i < d.size(); ++i) {
    const double denom =
        (t == 0.0) ? 1e-300 : t;  // standard guard against exact zero pivots
    t = d[i] - x - e[i - 1] * e[i - 1] / denom;
    if (t < 0.0) ++count;
  }
  return count;
}

inline double smallest_eig(const std::vector<double>& d,
                           const std::vector<double>& e) {
  // Gershgorin bracket.
  double lo = d[0], hi = d[0];
  for (std::size_t i = 0; i < d.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::fabs(e[i - 1]);
    if (i + 1 < d.size()) r += std::fabs(e[i]);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::fabs(lo));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(d, e, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// a0: even pi-periodic class, basis {1, cos 2z, cos 4z, ...}.
inline double a0(double q, std::size_t N = 32) {
  std::vector<double> d(N), e(N - 1);
  for (std::size_t j = 0; j < N; ++j) d[j] = 4.0 * double(j) * double(j);
  e[0] = std::sqrt(2.0) * q;
  for (std::size_t j = 1; j + 1 < N; ++j) e[j] = q;
  return smallest_eig(d, e);
}

// b1: odd 2pi-periodic class, basis {sin z, sin 3z, ...}.
inline double b1(double q, std::size_t N = 32) {
  std::vector<double> d(N), e(N - 1);
  for (std::size_t j = 0; j < N; ++j) {
    const double k = 2.0 * double(j) + 1.0;
    d[j] = k * k;
  }
  d[0] -= q;
  for (std::size_t j = 0; j + 1 < N; ++j) e[j] = q;
  return smallest_eig(d, e);
}

// a1: even 2pi-periodic class, basis {cos z, cos 3z, ...}.
inline double a1(double q, std::size_t N = 32) {
  std::vector<double> d(N), e(N - 1);
  for (std::size_t j = 0; j < N; ++j) {
    const double k = 2.0 * double(j) + 1.0;
    d[j] = k * k;
  }
  d[0] += q;
  for (std::size_t j = 0; j + 1 < N; ++j) e[j] = q;
  return smallest_eig(d, e);
}

}  // namespace mathieu
