#include "nlsframes/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "nlsframes/ode.hpp"
#include "nlsframes/quadrature.hpp"

namespace nlsframes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Two-point quintic Hermite (values, first and second derivatives).
double quintic_eval(double x0, double x1, double y0, double y1, double d0, double d1, double s0,
                    double s1, double x, double* deriv = nullptr) {
  double h = x1 - x0;
  double u = (x - x0) / h;
  double A = y1 - y0 - h * d0 - 0.5 * h * h * s0;
  double B = h * d1 - h * d0 - h * h * s0;
  double C = h * h * (s1 - s0);
  double a3 = 10 * A - 4 * B + 0.5 * C;
  double a4 = -15 * A + 7 * B - C;
  double a5 = 6 * A - 3 * B + 0.5 * C;
  double a0 = y0, a1 = h * d0, a2 = 0.5 * h * h * s0;
  if (deriv)
    *deriv = (a1 + u * (2 * a2 + u * (3 * a3 + u * (4 * a4 + u * 5 * a5)))) / h;
  return a0 + u * (a1 + u * (a2 + u * (a3 + u * (a4 + u * a5))));
}

std::size_t locate(const std::vector<double>& t, double x) {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  std::size_t i = (it == t.begin()) ? 0 : (it - t.begin() - 1);
  return std::min(i, t.size() - 2);
}

struct PairDense {
  const Scenario& s;
  const FundamentalPair& p;

  // second derivatives via the characteristic equation
  double dd_mu(double t, double mu, double dmu) const {
    CharCoeffs cc = s.char_coeffs(t);
    return cc.tau * dmu - 4.0 * cc.sigma * mu;
  }

  void eval(double t, double& mu0, double& dmu0, double& mu1, double& dmu1, double& lam) const {
    std::size_t i = locate(p.t, t);
    double t0 = p.t[i], t1 = p.t[i + 1];
    double s00 = dd_mu(t0, p.mu0[i], p.dmu0[i]);
    double s01 = dd_mu(t1, p.mu0[i + 1], p.dmu0[i + 1]);
    mu0 = quintic_eval(t0, t1, p.mu0[i], p.mu0[i + 1], p.dmu0[i], p.dmu0[i + 1], s00, s01, t,
                       &dmu0);
    double s10 = dd_mu(t0, p.mu1[i], p.dmu1[i]);
    double s11 = dd_mu(t1, p.mu1[i + 1], p.dmu1[i + 1]);
    mu1 = quintic_eval(t0, t1, p.mu1[i], p.mu1[i + 1], p.dmu1[i], p.dmu1[i + 1], s10, s11, t,
                       &dmu1);
    auto lrate = [&](double tt) { return -(s.c(tt) - 2.0 * s.d(tt)); };
    auto lcurv = [&](double tt, double lv) {
      double r = lrate(tt);
      double rp = -(s.c.derivative(tt) - 2.0 * s.d.derivative(tt));
      return (r * r + rp) * lv;
    };
    double l0 = p.lambda[i], l1 = p.lambda[i + 1];
    lam = quintic_eval(t0, t1, l0, l1, lrate(t0) * l0, lrate(t1) * l1, lcurv(t0, l0),
                       lcurv(t1, l1), t, nullptr);
  }
};

void fill_kernel_derivatives(const Scenario& s, TransformKernel& k) {
  const std::size_t n = k.t.size();
  k.dmu.assign(n, 0);
  k.dalpha.assign(n, 0);
  k.dbeta.assign(n, 0);
  k.dgamma.assign(n, 0);
  k.ddelta.assign(n, 0);
  k.deps.assign(n, 0);
  k.dkappa.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!k.valid[i]) continue;
    CoeffValues v = s.coeffs(k.t[i]);
    double al = k.alpha[i], be = k.beta[i], de = k.delta[i], ep = k.eps[i], mu = k.mu[i];
    double c0 = k.c0;
    k.dalpha[i] = -v.b - 2 * v.c * al - 4 * v.a * al * al + c0 * v.a * be * be * be * be;
    k.dbeta[i] = -(v.c + 4 * v.a * al) * be;
    k.dgamma[i] = -v.a * be * be;
    k.ddelta[i] = -(v.c + 4 * v.a * al) * de + v.f + 2 * v.g * al + 2 * c0 * v.a * be * be * be * ep;
    k.deps[i] = (v.g - 2 * v.a * de) * be;
    k.dkappa[i] = v.g * de - v.a * de * de + c0 * v.a * be * be * ep * ep;
    k.dmu[i] = (4 * v.a * al + 2 * v.d) * mu;
  }
}

// Detects zero crossings of a dense scalar function on consecutive valid
// nodes, bisects each to ~1e-12 and flags a guard band of samples invalid.
void detect_caustics(TransformKernel& k, const std::function<double(double)>& dense,
                     const std::string& kind) {
  const std::size_t n = k.t.size();
  std::vector<double> locations;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!k.valid[i] || !k.valid[i + 1]) continue;
    double f0 = dense(k.t[i]), f1 = dense(k.t[i + 1]);
    if (f0 == 0.0 || f0 * f1 >= 0.0) continue;
    double a = k.t[i], b = k.t[i + 1];
    for (int it = 0; it < 60; ++it) {
      double m = 0.5 * (a + b);
      double fm = dense(m);
      if (f0 * fm <= 0.0)
        b = m;
      else {
        a = m;
        f0 = fm;
      }
    }
    locations.push_back(0.5 * (a + b));
  }
  if (locations.empty()) return;
  double span = k.t.back() - k.t.front();
  double guard = 1.5 * span / static_cast<double>(n - 1);
  for (double tc : locations) {
    k.caustics.push_back({tc, kind});
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(k.t[i] - tc) <= guard) k.valid[i] = 0;
  }
}

}  // namespace

std::size_t FundamentalPair::segment(double tt) const { return locate(t, tt); }

namespace {
struct PairValues {
  double mu0, dmu0, mu1, dmu1, lambda;
};
PairValues pair_dense_at(const FundamentalPair& p, double t) {
  if (!p.scen) throw std::logic_error("fundamental pair lacks scenario");
  PairDense pd{*p.scen, p};
  PairValues v{};
  pd.eval(t, v.mu0, v.dmu0, v.mu1, v.dmu1, v.lambda);
  return v;
}
}  // namespace

double FundamentalPair::eval_mu0(double tt) const { return pair_dense_at(*this, tt).mu0; }
double FundamentalPair::eval_dmu0(double tt) const { return pair_dense_at(*this, tt).dmu0; }
double FundamentalPair::eval_mu1(double tt) const { return pair_dense_at(*this, tt).mu1; }
double FundamentalPair::eval_dmu1(double tt) const { return pair_dense_at(*this, tt).dmu1; }
double FundamentalPair::eval_lambda(double tt) const { return pair_dense_at(*this, tt).lambda; }

FundamentalPair fundamental_pair(const Scenario& s, std::span<const double> t_grid, int c0,
                                 double beta0_init) {
  if (t_grid.size() < 2) throw std::invalid_argument("fundamental_pair: need >= 2 grid nodes");
  if (std::abs(t_grid.front() - s.t0) > 1e-12 * std::max(1.0, std::abs(s.t0)))
    throw std::invalid_argument("fundamental_pair: grid must start at the scenario t0");
  s.check_time(t_grid.back());

  FundamentalPair p;
  p.c0 = c0;
  p.beta0_init = beta0_init;
  p.t.assign(t_grid.begin(), t_grid.end());
  const std::size_t n = p.t.size();
  p.mu0.assign(n, 0);
  p.dmu0.assign(n, 0);
  p.mu1.assign(n, 0);
  p.dmu1.assign(n, 0);
  p.lambda.assign(n, 0);

  double a0 = s.coeffs(s.t0).a;
  // states: mu0, mu0', mu1, mu1', lambda
  OdeRhs rhs = [&s](double t, std::span<const double> y, std::span<double> dy) {
    CharCoeffs cc = s.char_coeffs(t);
    CoeffValues v = s.coeffs(t);
    dy[0] = y[1];
    dy[1] = cc.tau * y[1] - 4.0 * cc.sigma * y[0];
    dy[2] = y[3];
    dy[3] = cc.tau * y[3] - 4.0 * cc.sigma * y[2];
    dy[4] = -(v.c - 2.0 * v.d) * y[4];
  };
  std::vector<double> y0 = {0.0, 2.0 * a0, 1.0, 0.0, 1.0};
  OdeOptions opt;
  integrate_on_grid(rhs, t_grid, y0, opt,
                    [&](std::size_t i, double, std::span<const double> y) {
                      p.mu0[i] = y[0];
                      p.dmu0[i] = y[1];
                      p.mu1[i] = y[2];
                      p.dmu1[i] = y[3];
                      p.lambda[i] = y[4];
                    });
  return p;
}

Kernel0 fundamental_kernel(const Scenario& s, const FundamentalPair& pair) {
  const std::size_t n = pair.t.size();
  Kernel0 k;
  k.t = pair.t;
  k.alpha0.assign(n, kNaN);
  k.beta0.assign(n, kNaN);
  k.gamma0.assign(n, kNaN);
  k.delta0.assign(n, kNaN);
  k.eps0.assign(n, kNaN);
  k.kappa0.assign(n, kNaN);
  k.u.assign(n, kNaN);
  k.valid_abc.assign(n, 0);
  k.valid_linear.assign(n, 0);

  double t0 = pair.t.front();
  CoeffValues v0 = s.coeffs(t0);
  double mu0_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) mu0_scale = std::max(mu0_scale, std::abs(pair.mu0[i]));

  for (std::size_t i = 0; i < n; ++i) {
    double m0 = pair.mu0[i];
    if (std::abs(m0) < 1e-12 * mu0_scale) continue;  // singular sample
    CoeffValues v = s.coeffs(pair.t[i]);
    k.alpha0[i] = pair.dmu0[i] / (4.0 * v.a * m0) - v.d / (2.0 * v.a);
    k.beta0[i] = -pair.lambda[i] / m0;
    k.gamma0[i] = pair.mu1[i] / (2.0 * m0) + v0.d / (2.0 * v0.a);
    k.valid_abc[i] = 1;
  }

  // forcing test
  double fg_max = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    fg_max = std::max({fg_max, std::abs(s.f(pair.t[i])), std::abs(s.g(pair.t[i]))});
  k.forcing_zero = fg_max < 1e-14;

  double delta00 = v0.g / (2.0 * v0.a);
  k.delta0[0] = delta00;
  k.eps0[0] = -delta00;
  k.kappa0[0] = 0.0;
  k.u[0] = 0.0;
  k.valid_linear[0] = 1;

  if (k.forcing_zero) {
    for (std::size_t i = 0; i < n; ++i) {
      k.delta0[i] = 0.0;
      k.eps0[i] = 0.0;
      k.kappa0[i] = 0.0;
      k.u[i] = 0.0;
      k.valid_linear[i] = 1;
    }
    return k;
  }

  // Integrate u' = [(f - (d/a) g) mu0 + (g/(2a)) mu0'] / lambda,
  // eps0' = -(g - 2 a delta0) lambda / mu0, kappa0' = g delta0 - a delta0^2,
  // delta0 = lambda u / mu0, starting just off the regular singular point t0.
  PairDense pd{s, pair};
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    double m0, dm0, m1, dm1, lam;
    pd.eval(t, m0, dm0, m1, dm1, lam);
    (void)m1;
    (void)dm1;
    CoeffValues v = s.coeffs(t);
    double q = ((v.f - (v.d / v.a) * v.g) * m0 + (v.g / (2.0 * v.a)) * dm0) / lam;
    double delta0 = lam * y[0] / m0;
    dy[0] = q;
    dy[1] = -(v.g - 2.0 * v.a * delta0) * lam / m0;
    dy[2] = v.g * delta0 - v.a * delta0 * delta0;
  };

  // Taylor start coefficients at t0.
  double a0 = v0.a, g0 = v0.g, f0 = v0.f, c0v = v0.c, d0v = v0.d;
  double da0 = s.a.derivative(t0), dg0 = s.g.derivative(t0);
  double tau0 = s.char_coeffs(t0).tau;
  double lam1 = -(c0v - 2.0 * d0v);
  double qp0 = 2.0 * a0 * f0 - 2.0 * d0v * g0 + (dg0 * a0 - g0 * da0) / a0 + g0 * tau0 -
               lam1 * g0;
  double ddelta0 = (lam1 * g0 + 0.5 * qp0 - 0.5 * g0 * tau0) / (2.0 * a0);
  double deps0 = -(dg0 - 2.0 * da0 * delta00 - 2.0 * a0 * ddelta0) / (2.0 * a0);
  double dkappa0 = g0 * delta00 - a0 * delta00 * delta00;

  double span = pair.t.back() - t0;
  double hs = 1e-5 * span;
  // first interior zero of mu0 bounds the regular interval
  double t_stop = pair.t.back();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (pair.mu0[i] * pair.mu0[i + 1] < 0.0 || pair.mu0[i] == 0.0) {
      t_stop = pair.t[i];
      break;
    }
  }

  std::vector<double> grid;
  grid.push_back(t0 + hs);
  for (std::size_t i = 1; i < n; ++i)
    if (pair.t[i] > t0 + hs && pair.t[i] <= t_stop) grid.push_back(pair.t[i]);
  if (grid.size() < 2) return k;

  double m0h, dm0h, m1h, dm1h, lamh;
  pd.eval(t0 + hs, m0h, dm0h, m1h, dm1h, lamh);
  double delta0_h = delta00 + ddelta0 * hs;
  std::vector<double> y = {delta0_h * m0h / lamh, -delta00 + deps0 * hs, dkappa0 * hs};

  OdeOptions opt;
  std::vector<std::size_t> node_of_grid(grid.size(), SIZE_MAX);
  {
    std::size_t gi = 0;
    for (std::size_t i = 1; i < n; ++i) {
      while (gi < grid.size() && grid[gi] < pair.t[i] - 1e-15) ++gi;
      if (gi < grid.size() && std::abs(grid[gi] - pair.t[i]) < 1e-12) node_of_grid[gi] = i;
    }
  }
  integrate_on_grid(rhs, grid, y, opt,
                    [&](std::size_t gi, double t, std::span<const double> yy) {
                      std::size_t i = node_of_grid[gi];
                      if (i == SIZE_MAX) return;
                      double m0, dm0, m1, dm1, lam;
                      pd.eval(t, m0, dm0, m1, dm1, lam);
                      (void)dm0;
                      (void)m1;
                      (void)dm1;
                      k.u[i] = yy[0];
                      k.delta0[i] = lam * yy[0] / m0;
                      k.eps0[i] = yy[1];
                      k.kappa0[i] = yy[2];
                      k.valid_linear[i] = 1;
                    });
  return k;
}

FundamentalSolution build_fundamental(const Scenario& s, std::span<const double> t_grid, int c0,
                                      double beta0_init) {
  FundamentalSolution fs;
  fs.scen = s;
  fs.pair = fundamental_pair(s, t_grid, c0, beta0_init);
  fs.pair.scen = &fs.scen;
  fs.k0 = fundamental_kernel(s, fs.pair);
  return fs;
}

namespace {

TransformKernel make_empty_kernel(const FundamentalSolution& fs, const KernelInit& init, int c0,
                                  const char* method) {
  if (init.beta == 0.0) throw std::invalid_argument("kernel: beta(0) must be nonzero");
  TransformKernel k;
  k.t = fs.pair.t;
  std::size_t n = k.t.size();
  k.mu.assign(n, kNaN);
  k.alpha.assign(n, kNaN);
  k.beta.assign(n, kNaN);
  k.gamma.assign(n, kNaN);
  k.delta.assign(n, kNaN);
  k.eps.assign(n, kNaN);
  k.kappa.assign(n, kNaN);
  k.valid.assign(n, 0);
  k.init = init;
  k.c0 = c0;
  k.method = method;
  return k;
}

void set_init_node(TransformKernel& k) {
  k.mu[0] = k.init.mu;
  k.alpha[0] = k.init.alpha;
  k.beta[0] = k.init.beta;
  k.gamma[0] = k.init.gamma;
  k.delta[0] = k.init.delta;
  k.eps[0] = k.init.eps;
  k.kappa[0] = k.init.kappa;
  k.valid[0] = 1;
}

// P(t) = mu0 * (alpha(0) + gamma0(t)), in the globally regular form.
struct RegularP {
  double alpha_init, d0_over_2a0;
  double operator()(double mu0, double mu1) const {
    return alpha_init * mu0 + d0_over_2a0 * mu0 + 0.5 * mu1;
  }
};

}  // namespace

TransformKernel riccati_superpose(const FundamentalSolution& fs, const KernelInit& init) {
  const Scenario& s = fs.scen;
  const FundamentalPair& p = fs.pair;
  const Kernel0& k0 = fs.k0;
  TransformKernel k = make_empty_kernel(fs, init, 0, "riccati-superposition");
  const std::size_t n = k.t.size();
  CoeffValues v0 = s.coeffs(p.t.front());
  RegularP P{init.alpha, v0.d / (2.0 * v0.a)};

  double mu0_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) mu0_scale = std::max(mu0_scale, std::abs(p.mu0[i]));

  set_init_node(k);
  for (std::size_t i = 1; i < n; ++i) {
    double m0 = p.mu0[i], dm0 = p.dmu0[i], m1 = p.mu1[i], lam = p.lambda[i];
    double Pi = P(m0, m1);
    if (std::abs(m0) < 1e-13 * mu0_scale || Pi == 0.0 || !k0.valid_linear[i]) continue;
    CoeffValues v = s.coeffs(k.t[i]);
    double de0 = k0.delta0[i], ep0 = k0.eps0[i], ka0 = k0.kappa0[i];
    double w = init.delta + ep0;
    k.mu[i] = 2.0 * init.mu * Pi;
    k.alpha[i] = (dm0 * Pi - v.a * lam * lam) / (4.0 * v.a * m0 * Pi) - v.d / (2.0 * v.a);
    k.beta[i] = init.beta * lam / (2.0 * Pi);
    k.gamma[i] = init.gamma - init.beta * init.beta * m0 / (4.0 * Pi);
    k.delta[i] = de0 + lam * w / (2.0 * Pi);
    k.eps[i] = init.eps - init.beta * w * m0 / (2.0 * Pi);
    k.kappa[i] = init.kappa + ka0 - w * w * m0 / (4.0 * Pi);
    k.valid[i] = 1;
  }
  PairDense pd{s, p};
  detect_caustics(k,
                  [&](double t) {
                    double m0, dm0, m1, dm1, lam;
                    pd.eval(t, m0, dm0, m1, dm1, lam);
                    (void)dm0; (void)dm1; (void)lam;
                    return P(m0, m1);
                  },
                  "mu-zero");
  fill_kernel_derivatives(s, k);
  return k;
}

TransformKernel ermakov_superpose(const FundamentalSolution& fs, const KernelInit& init) {
  const Scenario& s = fs.scen;
  const FundamentalPair& p = fs.pair;
  const Kernel0& k0 = fs.k0;
  TransformKernel k = make_empty_kernel(fs, init, 1, "ermakov-superposition");
  const std::size_t n = k.t.size();
  CoeffValues v0 = s.coeffs(p.t.front());
  RegularP P{init.alpha, v0.d / (2.0 * v0.a)};
  double b0 = init.beta, b02 = b0 * b0;

  double mu0_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) mu0_scale = std::max(mu0_scale, std::abs(p.mu0[i]));

  set_init_node(k);
  double theta_prev = 0.0, theta_acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    double m0 = p.mu0[i], dm0 = p.dmu0[i], m1 = p.mu1[i], lam = p.lambda[i];
    double Pi = P(m0, m1);
    double D = b02 * b02 * m0 * m0 + 4.0 * Pi * Pi;  // = |z|^2 > 0
    double sqD = std::sqrt(D);
    CoeffValues v = s.coeffs(k.t[i]);

    // angle of (2P, beta(0)^2 mu0), unwrapped along the grid
    double theta = std::atan2(b02 * m0, 2.0 * Pi);
    double inc = theta - theta_prev;
    while (inc > std::numbers::pi) inc -= 2.0 * std::numbers::pi;
    while (inc < -std::numbers::pi) inc += 2.0 * std::numbers::pi;
    if (std::abs(inc) > 0.5 * std::numbers::pi)
      throw std::runtime_error("ermakov_superpose: grid too coarse for angle unwrapping");
    theta_acc += inc;
    theta_prev = theta;

    if (!k0.valid_linear[i]) continue;
    double de0 = k0.delta0[i], ep0 = k0.eps0[i], ka0 = k0.kappa0[i];
    double w = init.delta + ep0;

    k.mu[i] = init.mu * sqD;
    k.beta[i] = b0 * lam / sqD;
    k.gamma[i] = init.gamma - 0.5 * theta_acc;
    k.delta[i] = de0 + lam * (init.eps * b02 * b0 * m0 + 2.0 * Pi * w) / D;
    k.eps[i] = (2.0 * init.eps * Pi - b0 * w * m0) / sqD;
    k.kappa[i] = init.kappa + ka0 +
                 (-init.eps * b02 * b0 * w * m0 * m0 +
                  Pi * m0 * (init.eps * init.eps * b02 - w * w)) /
                     D;
    if (std::abs(m0) < 1e-13 * mu0_scale) continue;  // alpha needs mu0 != 0
    k.alpha[i] = (dm0 * D - 4.0 * v.a * lam * lam * Pi) / (4.0 * v.a * m0 * D) -
                 v.d / (2.0 * v.a);
    k.valid[i] = 1;
  }
  fill_kernel_derivatives(s, k);
  return k;
}

ComplexFrame complex_frame(const FundamentalSolution& fs, const KernelInit& init) {
  if (init.beta == 0.0) throw std::invalid_argument("complex_frame: beta(0) must be nonzero");
  const FundamentalPair& p = fs.pair;
  const Kernel0& k0 = fs.k0;
  CoeffValues v0 = fs.scen.coeffs(p.t.front());
  double b02 = init.beta * init.beta;
  double shift = init.alpha + v0.d / (2.0 * v0.a);
  ComplexFrame fr;
  fr.init = init;
  fr.c1 = std::complex<double>(0.5 * (1.0 + b02), -shift);
  fr.c2 = std::complex<double>(0.5 * (1.0 - b02), shift);
  fr.c3 = std::complex<double>(init.eps * init.beta, init.delta);
  fr.t = p.t;
  const std::size_t n = p.t.size();
  fr.z.resize(n);
  fr.dz.resize(n);
  fr.zeta.resize(n);
  fr.E.resize(n);
  fr.lambda = p.lambda;
  fr.zeta_valid.assign(n, 0);
  double re_coeff = 2.0 * init.alpha + v0.d / v0.a;
  for (std::size_t i = 0; i < n; ++i) {
    fr.z[i] = std::complex<double>(re_coeff * p.mu0[i] + p.mu1[i], b02 * p.mu0[i]);
    fr.dz[i] = std::complex<double>(re_coeff * p.dmu0[i] + p.dmu1[i], b02 * p.dmu0[i]);
    fr.E[i] = std::complex<double>(p.mu1[i], p.mu0[i]);
    if (k0.valid_linear[i]) {
      fr.zeta[i] = fr.c3 + std::complex<double>(0.0, k0.eps0[i]);
      fr.zeta_valid[i] = 1;
    }
  }
  return fr;
}

TransformKernel kernel_from_frame_riccati(const FundamentalSolution& fs, const ComplexFrame& fr,
                                          const KernelInit& init) {
  const Scenario& s = fs.scen;
  TransformKernel k = make_empty_kernel(fs, init, 0, "complex-frame-riccati");
  const std::size_t n = k.t.size();
  double b0 = init.beta, b02 = b0 * b0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!fr.zeta_valid[i]) continue;
    double rez = fr.z[i].real(), imz = fr.z[i].imag();
    if (rez == 0.0) continue;
    CoeffValues v = s.coeffs(k.t[i]);
    double lam = fr.lambda[i];
    double imzeta = fr.zeta[i].imag();
    k.mu[i] = init.mu * rez;
    k.alpha[i] = fr.dz[i].real() / (4.0 * v.a * rez) - v.d / (2.0 * v.a);
    k.beta[i] = lam * b0 / rez;
    k.gamma[i] = init.gamma - imz / (2.0 * rez);
    k.delta[i] = fs.k0.delta0[i] + lam * imzeta / rez;
    k.eps[i] = init.eps - imzeta * imz / (b0 * rez);
    k.kappa[i] = init.kappa + fs.k0.kappa0[i] - imzeta * imzeta * imz / (2.0 * b02 * rez);
    k.valid[i] = 1;
  }
  // delta0(t0) cancels exactly at the initial node; enforce the exact values.
  set_init_node(k);
  PairDense pd{s, fs.pair};
  CoeffValues v0 = s.coeffs(k.t.front());
  double re_coeff = 2.0 * init.alpha + v0.d / v0.a;
  detect_caustics(k,
                  [&](double t) {
                    double m0, dm0, m1, dm1, lam;
                    pd.eval(t, m0, dm0, m1, dm1, lam);
                    (void)dm0; (void)dm1; (void)lam;
                    return re_coeff * m0 + m1;
                  },
                  "re-z-zero");
  fill_kernel_derivatives(s, k);
  return k;
}

TransformKernel kernel_from_frame_ermakov(const FundamentalSolution& fs, const ComplexFrame& fr,
                                          const KernelInit& init) {
  const Scenario& s = fs.scen;
  TransformKernel k = make_empty_kernel(fs, init, 1, "complex-frame-ermakov");
  const std::size_t n = k.t.size();
  double b0 = init.beta, b02 = b0 * b0;
  double arg_acc = 0.0;
  std::complex<double> z_prev(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> z = fr.z[i];
    double z2 = std::norm(z);
    if (z2 == 0.0) throw std::logic_error("kernel_from_frame_ermakov: z vanished");
    if (i > 0) {
      double inc = std::arg(z * std::conj(z_prev));
      if (std::abs(inc) > 0.5 * std::numbers::pi)
        throw std::runtime_error("kernel_from_frame_ermakov: grid too coarse for arg unwrapping");
      arg_acc += inc;
    }
    z_prev = z;
    if (!fr.zeta_valid[i]) continue;
    CoeffValues v = s.coeffs(k.t[i]);
    double lam = fr.lambda[i];
    std::complex<double> zeta = fr.zeta[i];
    double absz = std::sqrt(z2);
    k.mu[i] = init.mu * absz;
    k.alpha[i] = (std::conj(z) * fr.dz[i]).real() / (4.0 * v.a * z2) - v.d / (2.0 * v.a);
    k.beta[i] = lam * b0 / absz;
    k.gamma[i] = init.gamma - 0.5 * arg_acc;
    k.delta[i] = fs.k0.delta0[i] + lam * (zeta * z).imag() / z2;
    k.eps[i] = (zeta * z).real() / (b0 * absz);
    k.kappa[i] = init.kappa + fs.k0.kappa0[i] +
                 (zeta * zeta * z).real() * z.imag() / (2.0 * b02 * z2);
    k.valid[i] = 1;
  }
  set_init_node(k);
  fill_kernel_derivatives(s, k);
  return k;
}

TransformKernel integrate_riccati_direct(const Scenario& s, const KernelInit& init, int c0,
                                         std::span<const double> t_grid) {
  if (init.beta == 0.0) throw std::invalid_argument("kernel: beta(0) must be nonzero");
  TransformKernel k;
  k.t.assign(t_grid.begin(), t_grid.end());
  const std::size_t n = k.t.size();
  k.mu.assign(n, kNaN);
  k.alpha.assign(n, kNaN);
  k.beta.assign(n, kNaN);
  k.gamma.assign(n, kNaN);
  k.delta.assign(n, kNaN);
  k.eps.assign(n, kNaN);
  k.kappa.assign(n, kNaN);
  k.valid.assign(n, 0);
  k.init = init;
  k.c0 = c0;
  k.method = "direct-ode";

  OdeRhs rhs = [&s, c0](double t, std::span<const double> y, std::span<double> dy) {
    CoeffValues v = s.coeffs(t);
    double al = y[0], be = y[1], de = y[3], ep = y[4], mu = y[6];
    double b4 = be * be * be * be;
    dy[0] = -v.b - 2 * v.c * al - 4 * v.a * al * al + c0 * v.a * b4;
    dy[1] = -(v.c + 4 * v.a * al) * be;
    dy[2] = -v.a * be * be;
    dy[3] = -(v.c + 4 * v.a * al) * de + v.f + 2 * v.g * al + 2 * c0 * v.a * be * be * be * ep;
    dy[4] = (v.g - 2 * v.a * de) * be;
    dy[5] = v.g * de - v.a * de * de + c0 * v.a * be * be * ep * ep;
    dy[6] = (4 * v.a * al + 2 * v.d) * mu;
  };
  std::vector<double> y0 = {init.alpha, init.beta, init.gamma, init.delta,
                            init.eps,   init.kappa, init.mu};
  OdeOptions opt;
  auto halt = [](double, std::span<const double> y) { return std::abs(y[0]) > 1e9; };
  OdeHaltInfo hi = integrate_on_grid(rhs, t_grid, y0, opt,
                                     [&](std::size_t i, double, std::span<const double> y) {
                                       k.alpha[i] = y[0];
                                       k.beta[i] = y[1];
                                       k.gamma[i] = y[2];
                                       k.delta[i] = y[3];
                                       k.eps[i] = y[4];
                                       k.kappa[i] = y[5];
                                       k.mu[i] = y[6];
                                       k.valid[i] = 1;
                                     },
                                     halt);
  if (hi.halted) k.caustics.push_back({hi.t, "alpha-escape"});
  fill_kernel_derivatives(s, k);
  return k;
}

QuasiInvariantReport quasi_invariants(const TransformKernel& k, const FundamentalSolution& fs,
                                      const ComplexFrame& fr) {
  if (k.c0 != 1) throw std::invalid_argument("quasi_invariants: expects an Ermakov kernel");
  QuasiInvariantReport rep;
  const Kernel0& k0 = fs.k0;
  const std::size_t n = k.t.size();
  double mu0_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) mu0_scale = std::max(mu0_scale, std::abs(fs.pair.mu0[i]));

  // both displays are identities whose right sides carry eps0(t); they reduce
  // to conservation laws only when the forcing vanishes (eps0 constant)
  for (std::size_t i = 0; i < n; ++i) {
    if (!k.valid[i] || !k0.valid_linear[i]) continue;
    double e_ref = k.init.eps * k.init.eps +
                   std::pow((k.init.delta + k0.eps0[i]) / k.init.beta, 2);
    double e_i = k.eps[i] * k.eps[i] +
                 std::pow((k.delta[i] - k0.delta0[i]) / k.beta[i], 2);
    rep.pinney_invariant_sup = std::max(rep.pinney_invariant_sup, std::abs(e_i - e_ref));
    double kappa_const = (k0.eps0[i] + k.init.delta) * k.init.eps / (2.0 * k.init.beta);
    double v3 = k.kappa[i] - k.init.kappa - k0.kappa0[i] -
                (k.delta[i] - k0.delta0[i]) * k.eps[i] / (2.0 * k.beta[i]) + kappa_const;
    rep.kappa_identity_sup = std::max(rep.kappa_identity_sup, std::abs(v3));
    if (k0.valid_abc[i] && std::abs(fs.pair.mu0[i]) > 0.05 * mu0_scale) {
      double rez = fr.z[i].real(), imz = fr.z[i].imag();
      double v1 = 2.0 * (k.alpha[i] - k0.alpha0[i]) / (k.beta[i] * k.beta[i]) + rez / imz;
      rep.frame_ratio_sup = std::max(rep.frame_ratio_sup, std::abs(v1));
    }
    ++rep.evaluated;
  }
  return rep;
}

Kernel0QuadratureCheck kernel0_quadrature_check(const FundamentalSolution& fs, double t_end,
                                                int n_check) {
  const Scenario& s = fs.scen;
  const FundamentalPair& p = fs.pair;
  PairDense pd{s, p};
  double t0 = p.t.front();

  auto mu0_at = [&](double t) {
    double m0, dm0, m1, dm1, lam;
    pd.eval(t, m0, dm0, m1, dm1, lam);
    return m0;
  };
  auto dmu0_at = [&](double t) {
    double m0, dm0, m1, dm1, lam;
    pd.eval(t, m0, dm0, m1, dm1, lam);
    return dm0;
  };
  auto lam_at = [&](double t) {
    double m0, dm0, m1, dm1, lam;
    pd.eval(t, m0, dm0, m1, dm1, lam);
    return lam;
  };
  // dense u via Hermite on the integrated samples (u' available analytically)
  auto uprime = [&](double t) {
    CoeffValues v = s.coeffs(t);
    return ((v.f - (v.d / v.a) * v.g) * mu0_at(t) + (v.g / (2.0 * v.a)) * dmu0_at(t)) / lam_at(t);
  };
  auto u_at = [&](double t) {
    std::size_t i = locate(p.t, t);
    if (!fs.k0.valid_linear[i] || !fs.k0.valid_linear[i + 1])
      throw std::runtime_error("kernel0_quadrature_check: u samples unavailable");
    return hermite_eval(p.t[i], p.t[i + 1], fs.k0.u[i], fs.k0.u[i + 1], uprime(p.t[i]),
                        uprime(p.t[i + 1]), t);
  };
  auto delta0_at = [&](double t) { return lam_at(t) * u_at(t) / mu0_at(t); };
  auto fdg = [&](double t) {
    CoeffValues v = s.coeffs(t);
    return v.f - (v.d / v.a) * v.g;
  };
  auto sigma_at = [&](double t) { return s.char_coeffs(t).sigma; };
  auto a_at = [&](double t) { return s.coeffs(t).a; };

  Kernel0QuadratureCheck out;
  for (int j = 1; j <= n_check; ++j) {
    double t = t0 + (t_end - t0) * (0.2 + 0.8 * j / n_check);
    if (std::abs(dmu0_at(t)) < 1e-10)
      throw std::runtime_error("kernel0_quadrature_check: mu0' vanishes in the window");
    double lam = lam_at(t), m0 = mu0_at(t), dm0 = dmu0_at(t);
    double de0 = delta0_at(t);
    double I1 = integrate([&](double ss) {
      double d = dmu0_at(ss);
      return a_at(ss) * sigma_at(ss) * lam_at(ss) * lam_at(ss) * u_at(ss) / (d * d);
    }, t0, t, 1e-12);
    double I2 = integrate([&](double ss) { return a_at(ss) * lam_at(ss) * fdg(ss) / dmu0_at(ss); },
                          t0, t, 1e-12);
    double eps0_q = -(2.0 * a_at(t) * lam / dm0) * de0 + 8.0 * I1 + 2.0 * I2;
    double I3 = integrate([&](double ss) {
      double d = dmu0_at(ss);
      double lu = lam_at(ss) * u_at(ss);
      return a_at(ss) * sigma_at(ss) * lu * lu / (d * d);
    }, t0, t, 1e-12);
    double I4 = integrate([&](double ss) {
      return a_at(ss) * lam_at(ss) * u_at(ss) * fdg(ss) / dmu0_at(ss);
    }, t0, t, 1e-12);
    double kappa0_q = (a_at(t) * m0 / dm0) * de0 * de0 - 4.0 * I3 - 2.0 * I4;

    std::size_t i = locate(p.t, t);
    double w = (t - p.t[i]) / (p.t[i + 1] - p.t[i]);
    if (!fs.k0.valid_linear[i] || !fs.k0.valid_linear[i + 1])
      throw std::runtime_error("kernel0_quadrature_check: integrated samples unavailable");
    double eps0_ode = (1 - w) * fs.k0.eps0[i] + w * fs.k0.eps0[i + 1];
    double kappa0_ode = (1 - w) * fs.k0.kappa0[i] + w * fs.k0.kappa0[i + 1];
    double delta0_ode = (1 - w) * fs.k0.delta0[i] + w * fs.k0.delta0[i + 1];
    out.delta_sup = std::max(out.delta_sup, std::abs(de0 - delta0_ode));
    out.eps_sup = std::max(out.eps_sup, std::abs(eps0_q - eps0_ode));
    out.kappa_sup = std::max(out.kappa_sup, std::abs(kappa0_q - kappa0_ode));
  }
  return out;
}

double pinney_residual_sup(const Scenario& s, const TransformKernel& k,
                           const FundamentalPair& pair) {
  double sup = 0.0;
  double rhs_const = std::pow(k.init.beta * k.init.mu, 4);
  for (std::size_t i = 0; i < k.t.size(); ++i) {
    if (!k.valid[i]) continue;
    double t = k.t[i];
    CoeffValues v = s.coeffs(t);
    CharCoeffs cc = s.char_coeffs(t);
    double da = s.a.derivative(t), dd = s.d.derivative(t);
    double mu = k.mu[i], dmu = k.dmu[i];
    double ddmu = (4 * da * k.alpha[i] + 4 * v.a * k.dalpha[i] + 2 * dd) * mu +
                  (4 * v.a * k.alpha[i] + 2 * v.d) * dmu;
    double lam = pair.lambda[i];
    double rhs = k.c0 * 4.0 * v.a * v.a * rhs_const * std::pow(lam, 4) / (mu * mu * mu);
    double res = ddmu - cc.tau * dmu + 4.0 * cc.sigma * mu - rhs;
    double scale = std::max({std::abs(ddmu), std::abs(cc.tau * dmu),
                             std::abs(4.0 * cc.sigma * mu), std::abs(rhs), 1e-30});
    sup = std::max(sup, std::abs(res) / scale);
  }
  return sup;
}

KernelDense::KernelDense(const TransformKernel& k) : k_(&k) {}

std::size_t KernelDense::segment(double t) const { return locate(k_->t, t); }

double KernelDense::eval(const std::vector<double>& y, const std::vector<double>& dy,
                         double t) const {
  std::size_t i = segment(t);
  if (!k_->valid[i] || !k_->valid[i + 1])
    throw std::domain_error("kernel dense evaluation inside an invalid (caustic) band");
  return hermite_eval(k_->t[i], k_->t[i + 1], y[i], y[i + 1], dy[i], dy[i + 1], t);
}

double KernelDense::mu(double t) const { return eval(k_->mu, k_->dmu, t); }
double KernelDense::alpha(double t) const { return eval(k_->alpha, k_->dalpha, t); }
double KernelDense::beta(double t) const { return eval(k_->beta, k_->dbeta, t); }
double KernelDense::gamma(double t) const { return eval(k_->gamma, k_->dgamma, t); }
double KernelDense::delta(double t) const { return eval(k_->delta, k_->ddelta, t); }
double KernelDense::eps(double t) const { return eval(k_->eps, k_->deps, t); }
double KernelDense::kappa(double t) const { return eval(k_->kappa, k_->dkappa, t); }

double KernelDense::invert_gamma(double tau) const {
  const auto& t = k_->t;
  const auto& g = k_->gamma;
  // gamma is monotone decreasing for a*beta^2 > 0; locate the bracketing segment
  std::size_t lo = 0, hi = t.size() - 1;
  bool decreasing = g.back() < g.front();
  auto inside = [&](double val, double g0, double g1) {
    return decreasing ? (val <= g0 + 1e-14 && val >= g1 - 1e-14)
                      : (val >= g0 - 1e-14 && val <= g1 + 1e-14);
  };
  std::size_t seg = SIZE_MAX;
  for (std::size_t i = lo; i < hi; ++i) {
    if (!k_->valid[i] || !k_->valid[i + 1]) continue;
    if (inside(tau, g[i], g[i + 1])) {
      seg = i;
      break;
    }
  }
  if (seg == SIZE_MAX) throw std::domain_error("invert_gamma: value outside the gamma range");
  double a = t[seg], b = t[seg + 1];
  double x = 0.5 * (a + b);
  for (int it = 0; it < 100; ++it) {
    double val = hermite_eval(t[seg], t[seg + 1], g[seg], g[seg + 1], k_->dgamma[seg],
                              k_->dgamma[seg + 1], x);
    double der = hermite_deriv(t[seg], t[seg + 1], g[seg], g[seg + 1], k_->dgamma[seg],
                               k_->dgamma[seg + 1], x);
    double err = val - tau;
    if (std::abs(err) < 1e-14 * std::max(1.0, std::abs(tau))) return x;
    // val > tau lies left of the root when gamma decreases, right otherwise
    if (err * (decreasing ? 1.0 : -1.0) > 0)
      a = x;
    else
      b = x;
    double xn = (der != 0.0) ? x - err / der : 0.5 * (a + b);
    x = (xn > a && xn < b) ? xn : 0.5 * (a + b);
  }
  return x;
}

void write_kernel_csv(const TransformKernel& k, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path);
  std::fprintf(fp, "t,mu,alpha,beta,gamma,delta,eps,kappa,valid_flag\n");
  for (std::size_t i = 0; i < k.t.size(); ++i) {
    std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", k.t[i], k.mu[i],
                 k.alpha[i], k.beta[i], k.gamma[i], k.delta[i], k.eps[i], k.kappa[i],
                 static_cast<int>(k.valid[i]));
  }
  std::fclose(fp);
}

std::string kernel_sidecar_json(const TransformKernel& k) {
  nlohmann::json j;
  j["method"] = k.method;
  j["c0"] = k.c0;
  j["init"] = {{"mu", k.init.mu},       {"alpha", k.init.alpha}, {"beta", k.init.beta},
               {"gamma", k.init.gamma}, {"delta", k.init.delta}, {"eps", k.init.eps},
               {"kappa", k.init.kappa}};
  j["caustics"] = nlohmann::json::array();
  for (const auto& c : k.caustics) j["caustics"].push_back({{"t", c.t}, {"kind", c.kind}});
  return j.dump(2);
}

}  // namespace nlsframes
