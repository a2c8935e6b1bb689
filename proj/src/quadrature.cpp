#include "nlsframes/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsframes {

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1].
constexpr double xgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                           0.741531185599394, 0.586087235467691, 0.405845151377397,
                           0.207784955007898, 0.0};
constexpr double wgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                           0.140653259715525, 0.169004726639267, 0.190350578064785,
                           0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                          0.417959183673469};

template <typename T>
struct GkResult {
  T integral;
  double error;
};

template <typename T, typename F>
GkResult<T> gk15(const F& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T resg = wg[3] * fc;
  T resk = wgk[7] * fc;
  for (int j = 0; j < 7; ++j) {
    double dx = h * xgk[j];
    T f1 = f(c - dx), f2 = f(c + dx);
    resk += wgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  resk *= h;
  resg *= h;
  return {resk, std::abs(resk - resg)};
}

template <typename T, typename F>
T adaptive(const F& f, double a, double b, double tol, int depth, int max_depth) {
  auto r = gk15<T>(f, a, b);
  // the noise floor keeps roundoff-limited leaves from splitting forever
  double floor = 5e-15 * (std::abs(r.integral) + 1e-30);
  if (r.error <= std::max(tol, floor) || depth >= max_depth) return r.integral;
  double c = 0.5 * (a + b);
  return adaptive<T>(f, a, c, tol / 2, depth + 1, max_depth) +
         adaptive<T>(f, c, b, tol / 2, depth + 1, max_depth);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
  return adaptive<double>(f, a, b, tol, 0, max_depth);
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, double tol) {
  return adaptive<std::complex<double>>(f, a, b, tol, 0, 60);
}

std::vector<double> cumtrapz(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("cumtrapz: size mismatch");
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return out;
}

double trapz_uniform(const std::vector<double>& y, double h) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * h;
}

}  // namespace nlsframes
