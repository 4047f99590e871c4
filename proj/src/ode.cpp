#include "hillspec/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hillspec/errors.hpp"
#include "hillspec/io_util.hpp"

namespace hillspec {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33,
                 A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;

constexpr double kOverflowGuard = 1e200;

// K coupled copies of (v, u) sharing one coefficient evaluation per stage;
// u = dv/dtau with z = z0 + dir*tau.
template <int K>
using State = std::array<double, 2 * K>;

template <int K>
State<K> rhs(const ModeCoefficient& coeff, double z, const State<K>& y) {
  const double Q = coeff.q(z);
  if (!std::isfinite(Q))
    throw DomainError("coefficient Q is not finite at z = " +
                      ioutil::fmt17(z));
  State<K> f;
  for (int k = 0; k < K; ++k) {
    f[2 * k] = y[2 * k + 1];
    f[2 * k + 1] = Q * y[2 * k];
  }
  return f;
}

template <int K>
void axpy(State<K>& y, double a, const State<K>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// One RK step of size hs from tau; y is advanced in place.
template <int K>
void dp5_step(const ModeCoefficient& coeff, double z0, double dir, double tau,
              double hs, State<K>& y) {
  const auto at = [&](double t) { return z0 + dir * t; };
  const State<K> k1 = rhs<K>(coeff, at(tau), y);
  State<K> t = y;
  axpy<K>(t, hs * A21, k1);
  const State<K> k2 = rhs<K>(coeff, at(tau + C2 * hs), t);
  t = y;
  axpy<K>(t, hs * A31, k1);
  axpy<K>(t, hs * A32, k2);
  const State<K> k3 = rhs<K>(coeff, at(tau + C3 * hs), t);
  t = y;
  axpy<K>(t, hs * A41, k1);
  axpy<K>(t, hs * A42, k2);
  axpy<K>(t, hs * A43, k3);
  const State<K> k4 = rhs<K>(coeff, at(tau + C4 * hs), t);
  t = y;
  axpy<K>(t, hs * A51, k1);
  axpy<K>(t, hs * A52, k2);
  axpy<K>(t, hs * A53, k3);
  axpy<K>(t, hs * A54, k4);
  const State<K> k5 = rhs<K>(coeff, at(tau + C5 * hs), t);
  t = y;
  axpy<K>(t, hs * A61, k1);
  axpy<K>(t, hs * A62, k2);
  axpy<K>(t, hs * A63, k3);
  axpy<K>(t, hs * A64, k4);
  axpy<K>(t, hs * A65, k5);
  const State<K> k6 = rhs<K>(coeff, at(tau + hs), t);
  axpy<K>(y, hs * B1, k1);
  axpy<K>(y, hs * B3, k3);
  axpy<K>(y, hs * B4, k4);
  axpy<K>(y, hs * B5, k5);
  axpy<K>(y, hs * B6, k6);
}

template <int K>
double max_abs(const State<K>& y) {
  double m = 0.0;
  for (double x : y) m = std::max(m, std::fabs(x));
  return m;
}

// Integrates over [0, L] in n steps; returns node states when store != null.
template <int K>
State<K> run(const ModeCoefficient& coeff, double z0, double dir, double L,
             long n, State<K> y, std::vector<State<K>>* store) {
  const double hs = L / static_cast<double>(n);
  if (store) {
    store->clear();
    store->reserve(static_cast<std::size_t>(n) + 1);
    store->push_back(y);
  }
  for (long i = 0; i < n; ++i) {
    dp5_step<K>(coeff, z0, dir, static_cast<double>(i) * hs, hs, y);
    if (max_abs<K>(y) > kOverflowGuard)
      throw GrowthError(
          "state exceeded the overflow guard during integration at z = " +
          ioutil::fmt17(z0 + dir * static_cast<double>(i + 1) * hs));
    if (store) store->push_back(y);
  }
  return y;
}

}  // namespace

Trajectory propagate(const ModeCoefficient& coeff, double z0, double z1,
                     StateVector init, double h) {
  const double L = std::fabs(z1 - z0);
  if (!(h > 0.0)) throw DomainError("propagate: h must be positive");
  if (L == 0.0) throw DomainError("propagate: empty interval");
  if (h > L / 10.0)
    throw DomainError("propagate: h must not exceed a tenth of the interval");
  const double dir = (z1 > z0) ? 1.0 : -1.0;
  const long n = std::max(10L, std::lround(L / h));

  std::vector<State<1>> nodes;
  const State<1> y0{init.v, dir * init.vp};  // u = dir * v'
  const State<1> yend = run<1>(coeff, z0, dir, L, n, y0, &nodes);
  const State<1> yend2 = run<1>(coeff, z0, dir, L, 2 * n, y0, nullptr);

  double diff = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    diff = std::max(diff, std::fabs(yend[i] - yend2[i]));
  const double scale = std::max(1.0, max_abs<1>(yend));

  Trajectory t;
  t.h_ = L / static_cast<double>(n);
  t.err_ = diff / scale;
  const std::size_t m = nodes.size();
  t.z_.resize(m);
  t.v_.resize(m);
  t.vp_.resize(m);
  t.vpp_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    // Ascending storage: reverse the node order for backward runs.
    const std::size_t j = (dir > 0) ? i : m - 1 - i;
    const double tau = static_cast<double>(j) * t.h_;
    const double z = z0 + dir * tau;
    t.z_[i] = z;
    t.v_[i] = nodes[j][0];
    t.vp_[i] = dir * nodes[j][1];
    t.vpp_[i] = coeff.q(z) * nodes[j][0];
  }
  return t;
}

Matrix2 propagate_fundamental(const ModeCoefficient& coeff, double z0,
                              double z1, double h) {
  const double L = std::fabs(z1 - z0);
  if (!(h > 0.0)) throw DomainError("fundamental system: h must be positive");
  if (L == 0.0) throw DomainError("fundamental system: empty interval");
  const double dir = (z1 > z0) ? 1.0 : -1.0;
  const long n = std::max(10L, std::lround(L / h));
  // Columns phi1 = (1,0), phi2 = (0,1); u = dir * v'.
  State<2> y{1.0, 0.0, 0.0, dir * 1.0};
  y = run<2>(coeff, z0, dir, L, n, y, nullptr);
  Matrix2 M;
  M.a = y[0];
  M.c = dir * y[1];
  M.b = y[2];
  M.d = dir * y[3];
  return M;
}

void Trajectory::locate(double z, std::size_t& i, double& s) const {
  if (z_.empty()) throw DomainError("dense output on an empty trajectory");
  const double slack = 1e-12 * std::max(1.0, std::fabs(z_.back()));
  if (z < z_.front() - slack || z > z_.back() + slack)
    throw DomainError("dense output outside the trajectory range at z = " +
                      ioutil::fmt17(z));
  double t = (z - z_.front()) / h_;
  if (t < 0.0) t = 0.0;
  i = static_cast<std::size_t>(t);
  if (i >= z_.size() - 1) i = z_.size() - 2;
  s = (z - z_[i]) / h_;
  if (s < 0.0) s = 0.0;
  if (s > 1.0) s = 1.0;
}

namespace {

// Quintic two-point Taylor basis on s in [0,1]: H0..H2 match value, first
// and second derivative at s=0, H3..H5 the same at s=1.
struct QuinticCell {
  double f0, d0, s0, f1, d1, s1;  // d = h f', s = h^2 f''

  double value(double s) const {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double H0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    const double H1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    const double H2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    const double H3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    const double H4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    const double H5 = 0.5 * s3 - s4 + 0.5 * s5;
    return f0 * H0 + d0 * H1 + s0 * H2 + f1 * H3 + d1 * H4 + s1 * H5;
  }
  double deriv(double s) const {  // d/ds
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    const double H0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    const double H1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    const double H2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
    const double H3 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
    const double H4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    const double H5 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
    return f0 * H0 + d0 * H1 + s0 * H2 + f1 * H3 + d1 * H4 + s1 * H5;
  }
  double second(double s) const {  // d^2/ds^2
    const double s2 = s * s, s3 = s2 * s;
    const double H0 = -60.0 * s + 180.0 * s2 - 120.0 * s3;
    const double H1 = -36.0 * s + 96.0 * s2 - 60.0 * s3;
    const double H2 = 1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3;
    const double H3 = 60.0 * s - 180.0 * s2 + 120.0 * s3;
    const double H4 = -24.0 * s + 84.0 * s2 - 60.0 * s3;
    const double H5 = 3.0 * s - 12.0 * s2 + 10.0 * s3;
    return f0 * H0 + d0 * H1 + s0 * H2 + f1 * H3 + d1 * H4 + s1 * H5;
  }
};

}  // namespace

double Trajectory::value(double z) const {
  std::size_t i;
  double s;
  locate(z, i, s);
  const QuinticCell c{v_[i],     h_ * vp_[i],     h_ * h_ * vpp_[i],
                      v_[i + 1], h_ * vp_[i + 1], h_ * h_ * vpp_[i + 1]};
  return c.value(s);
}

double Trajectory::deriv(double z) const {
  std::size_t i;
  double s;
  locate(z, i, s);
  const QuinticCell c{v_[i],     h_ * vp_[i],     h_ * h_ * vpp_[i],
                      v_[i + 1], h_ * vp_[i + 1], h_ * h_ * vpp_[i + 1]};
  return c.deriv(s) / h_;
}

double Trajectory::second_deriv(double z) const {
  std::size_t i;
  double s;
  locate(z, i, s);
  const QuinticCell c{v_[i],     h_ * vp_[i],     h_ * h_ * vpp_[i],
                      v_[i + 1], h_ * vp_[i + 1], h_ * h_ * vpp_[i + 1]};
  return c.second(s) / (h_ * h_);
}

Trajectory Trajectory::merge(const Trajectory& left, const Trajectory& right) {
  if (left.z_.empty() || right.z_.empty())
    throw DomainError("merge: empty trajectory");
  const double tol = 1e-9 * std::max(1.0, std::fabs(left.z_.back()));
  if (std::fabs(left.z_.back() - right.z_.front()) > tol)
    throw DomainError("merge: trajectories do not share an endpoint");
  if (std::fabs(left.h_ - right.h_) > 1e-12 * left.h_)
    throw DomainError("merge: step sizes differ");
  Trajectory t;
  t.h_ = left.h_;
  t.err_ = std::max(left.err_, right.err_);
  const auto append = [](std::vector<double>& dst, const std::vector<double>& a,
                         const std::vector<double>& b) {
    dst = a;
    dst.insert(dst.end(), b.begin() + 1, b.end());
  };
  append(t.z_, left.z_, right.z_);
  append(t.v_, left.v_, right.v_);
  append(t.vp_, left.vp_, right.vp_);
  append(t.vpp_, left.vpp_, right.vpp_);
  return t;
}

Trajectory Trajectory::from_nodes(std::vector<double> z, std::vector<double> v,
                                  std::vector<double> vp,
                                  std::vector<double> vpp) {
  if (z.size() < 2 || z.size() != v.size() || z.size() != vp.size() ||
      z.size() != vpp.size())
    throw DomainError("from_nodes: inconsistent array sizes");
  Trajectory t;
  t.h_ = z[1] - z[0];
  if (!(t.h_ > 0.0)) throw DomainError("from_nodes: grid not ascending");
  t.err_ = 0.0;
  t.z_ = std::move(z);
  t.v_ = std::move(v);
  t.vp_ = std::move(vp);
  t.vpp_ = std::move(vpp);
  return t;
}

double residual_at(const Trajectory& t, const ModeCoefficient& coeff,
                   double z) {
  return std::fabs(t.second_deriv(z) - coeff.q(z) * t.value(z));
}

}  // namespace hillspec
