#include "nlsframes/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsframes {

namespace {
void check_nodes(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_n) {
  if (x.size() != y.size()) throw std::invalid_argument("spline: size mismatch");
  if (x.size() < min_n) throw std::invalid_argument("spline: too few nodes");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("spline: nodes must increase");
}
}  // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  check_nodes(x_, y_, 3);
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

  // Solve for second derivatives m[i] with not-a-knot end conditions:
  //   h1 m0 - (h0+h1) m1 + h0 m2 = 0
  //   h_{n-2} m_{n-3} - (h_{n-3}+h_{n-2}) m_{n-2} + h_{n-3} m_{n-1} = 0.
  // m0 and m_{n-1} are substituted out, leaving a tridiagonal system for
  // m1..m_{n-2}.
  std::vector<double> m(n, 0.0);
  if (n == 3) {
    // With three points both not-a-knot rows coincide; the interpolant is the
    // quadratic through the points (constant second derivative).
    double s0 = (y_[1] - y_[0]) / h[0], s1 = (y_[2] - y_[1]) / h[1];
    m[0] = m[1] = m[2] = 2.0 * (s1 - s0) / (h[0] + h[1]);
  } else {
    const std::size_t k = n - 2;  // unknowns m1..m_{n-2}
    std::vector<double> lo(k, 0.0), di(k, 0.0), up(k, 0.0), r(k, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      lo[i - 1] = h[i - 1];
      di[i - 1] = 2.0 * (h[i - 1] + h[i]);
      up[i - 1] = h[i];
      r[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    // substitute m0 = ((h0+h1) m1 - h0 m2)/h1 into the first equation
    di[0] += lo[0] * (h[0] + h[1]) / h[1];
    up[0] -= lo[0] * h[0] / h[1];
    lo[0] = 0.0;
    // substitute m_{n-1} = ((h_{n-3}+h_{n-2}) m_{n-2} - h_{n-2} m_{n-3})/h_{n-3}
    di[k - 1] += up[k - 1] * (h[n - 3] + h[n - 2]) / h[n - 3];
    lo[k - 1] -= up[k - 1] * h[n - 2] / h[n - 3];
    up[k - 1] = 0.0;
    // Thomas algorithm
    for (std::size_t i = 1; i < k; ++i) {
      double w = lo[i] / di[i - 1];
      di[i] -= w * up[i - 1];
      r[i] -= w * r[i - 1];
    }
    m[n - 2] = r[k - 1] / di[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) m[i + 1] = (r[i] - up[i] * m[i + 2]) / di[i];
    m[0] = ((h[0] + h[1]) * m[1] - h[0] * m[2]) / h[1];
    m[n - 1] = ((h[n - 3] + h[n - 2]) * m[n - 2] - h[n - 2] * m[n - 3]) / h[n - 3];
  }

  b_.resize(n - 1);
  c_.resize(n - 1);
  d_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    b_[i] = (y_[i + 1] - y_[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    c_[i] = m[i] / 2.0;
    d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
}

std::size_t CubicSpline::find(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = (it == x_.begin()) ? 0 : (it - x_.begin() - 1);
  return std::min(i, x_.size() - 2);
}

double CubicSpline::operator()(double x) const {
  std::size_t i = find(x);
  double u = x - x_[i];
  return y_[i] + u * (b_[i] + u * (c_[i] + u * d_[i]));
}

double CubicSpline::derivative(double x) const {
  std::size_t i = find(x);
  double u = x - x_[i];
  return b_[i] + u * (2.0 * c_[i] + 3.0 * u * d_[i]);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  check_nodes(x_, y_, 2);
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), s(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    s[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  m_.assign(n, 0.0);
  m_[0] = s[0];
  m_[n - 1] = s[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    m_[i] = (s[i - 1] * s[i] <= 0.0) ? 0.0 : 0.5 * (s[i - 1] + s[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (s[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    double a = m_[i] / s[i], b = m_[i + 1] / s[i];
    double r = a * a + b * b;
    if (r > 9.0) {
      double tau = 3.0 / std::sqrt(r);
      m_[i] = tau * a * s[i];
      m_[i + 1] = tau * b * s[i];
    }
  }
}

std::size_t MonotoneCubic::find(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = (it == x_.begin()) ? 0 : (it - x_.begin() - 1);
  return std::min(i, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
  std::size_t i = find(x);
  return hermite_eval(x_[i], x_[i + 1], y_[i], y_[i + 1], m_[i], m_[i + 1], x);
}

double hermite_eval(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  double h = x1 - x0;
  double u = (x - x0) / h;
  double u2 = u * u, u3 = u2 * u;
  return y0 * (2 * u3 - 3 * u2 + 1) + h * d0 * (u3 - 2 * u2 + u) + y1 * (-2 * u3 + 3 * u2) +
         h * d1 * (u3 - u2);
}

double hermite_deriv(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  double h = x1 - x0;
  double u = (x - x0) / h;
  double u2 = u * u;
  return (y0 * (6 * u2 - 6 * u) + h * d0 * (3 * u2 - 4 * u + 1) + y1 * (-6 * u2 + 6 * u) +
          h * d1 * (3 * u2 - 2 * u)) /
         h;
}

}  // namespace nlsframes
