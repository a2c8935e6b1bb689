#include "nlsframes/transform.hpp"

#include <cmath>
#include <stdexcept>

#include "nlsframes/quadrature.hpp"
#include "nlsframes/spline.hpp"
#include "nlsframes/util.hpp"

namespace nlsframes {

namespace {
using cdouble = std::complex<double>;
const cdouble kI{0.0, 1.0};
}  // namespace

namespace {
struct StandardEqVisitor {
  AutonomousStandardEq operator()(const LinearFreeEq&) const { return {}; }
  AutonomousStandardEq operator()(const CubicEq& e) const {
    AutonomousStandardEq a;
    a.d2 = 2.0 * e.sign;
    return a;
  }
  AutonomousStandardEq operator()(const QuinticFreeEq& e) const {
    AutonomousStandardEq a;
    a.d5 = -0.75 * e.sign;
    return a;
  }
  AutonomousStandardEq operator()(const QuinticTrapEq& e) const {
    AutonomousStandardEq a;
    a.c0 = 1;
    a.d5 = -0.75 * e.sign;
    return a;
  }
  AutonomousStandardEq operator()(const DnlsTrapEq& e) const {
    AutonomousStandardEq a;
    a.c0 = 1;
    a.d3 = e.d3;
    a.d4 = e.d3;
    a.d5 = e.d5;
    return a;
  }
  template <typename Other>
  AutonomousStandardEq operator()(const Other&) const {
    throw std::invalid_argument("catalog solution does not live on a standard autonomous form");
  }
};
}  // namespace

StandardSolution standard_from_catalog(const SolutionHandle& handle) {
  StandardSolution s;
  SolutionHandle h = handle;
  s.chi = [h](double xi, double tau) { return h->eval(xi, -tau); };
  s.eq = std::visit(StandardEqVisitor{}, handle->equation());
  return s;
}

StandardSolution rescale_cubic(const StandardSolution& s, cdouble d2_target) {
  if (s.eq.d2 == cdouble{} || d2_target == cdouble{})
    throw std::invalid_argument("rescale_cubic: both couplings must be nonzero");
  if (s.eq.d0 != cdouble{} || s.eq.d1 != cdouble{} || s.eq.d3 != cdouble{} ||
      s.eq.d4 != cdouble{} || s.eq.d5 != cdouble{})
    throw std::invalid_argument("rescale_cubic: solution must be purely cubic");
  cdouble sigma = std::sqrt(s.eq.d2 / d2_target);
  StandardSolution out;
  auto chi = s.chi;
  out.chi = [chi, sigma](double xi, double tau) { return sigma * chi(xi, tau); };
  out.eq = s.eq;
  out.eq.d2 = d2_target;
  return out;
}

std::complex<double> push_forward_point(const KernelDense& kd, const StandardSolution& chi,
                                        double x, double t) {
  double mu = kd.mu(t);
  if (!(mu > 0)) throw std::domain_error("push_forward: mu must stay positive (caustic?)");
  double al = kd.alpha(t), be = kd.beta(t), ga = kd.gamma(t);
  double de = kd.delta(t), ep = kd.eps(t), ka = kd.kappa(t);
  double S = al * x * x + de * x + ka;
  return std::exp(kI * S) / std::sqrt(mu) * chi.chi(be * x + ep, ga);
}

WaveField push_forward(const Scenario& scen, const TransformKernel& k, const StandardSolution& chi,
                       const Grid1D& x_grid, const std::vector<double>& t_slices) {
  (void)scen;
  KernelDense kd(k);
  WaveField f;
  f.x = x_grid;
  f.t = t_slices;
  f.values.resize(t_slices.size() * x_grid.n);
  parallel_for(t_slices.size(), [&](std::size_t it) {
    double t = t_slices[it];
    double mu = kd.mu(t);
    if (!(mu > 0)) throw std::domain_error("push_forward: mu must stay positive (caustic?)");
    double al = kd.alpha(t), be = kd.beta(t), ga = kd.gamma(t);
    double de = kd.delta(t), ep = kd.eps(t), ka = kd.kappa(t);
    double inv_sqrt_mu = 1.0 / std::sqrt(mu);
    for (int i = 0; i < x_grid.n; ++i) {
      double x = x_grid.x(i);
      double S = al * x * x + de * x + ka;
      f.at(it, i) = std::exp(kI * S) * inv_sqrt_mu * chi.chi(be * x + ep, ga);
    }
  });
  return f;
}

std::complex<double> pull_back_point(const KernelDense& kd,
                                     const std::function<cdouble(double, double)>& psi,
                                     double xi, double tau) {
  double t = kd.invert_gamma(tau);
  double mu = kd.mu(t);
  if (!(mu > 0)) throw std::domain_error("pull_back: mu must stay positive");
  double be = kd.beta(t);
  if (be == 0.0) throw std::domain_error("pull_back: beta(t) vanished");
  double x = (xi - kd.eps(t)) / be;
  double S = kd.alpha(t) * x * x + kd.delta(t) * x + kd.kappa(t);
  return std::sqrt(mu) * std::exp(-kI * S) * psi(x, t);
}

namespace {

// Tensor-cubic-spline evaluator over a sampled field (real and imaginary parts
// splined separately; t-direction splined through per-slice x-spline values).
class FieldInterpolator {
 public:
  explicit FieldInterpolator(const WaveField& f) : f_(&f), xs_(f.x.points()) {
    re_.reserve(f.nt());
    im_.reserve(f.nt());
    for (std::size_t it = 0; it < f.nt(); ++it) {
      std::vector<double> re(f.x.n), im(f.x.n);
      for (int i = 0; i < f.x.n; ++i) {
        re[i] = f.at(it, i).real();
        im[i] = f.at(it, i).imag();
      }
      re_.emplace_back(xs_, re);
      im_.emplace_back(xs_, im);
    }
  }

  cdouble operator()(double x, double t) const {
    const auto& ts = f_->t;
    if (ts.size() == 1) return {re_[0](x), im_[0](x)};
    // cubic interpolation in t through the 4 nearest slices
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j = (it == ts.begin()) ? 0 : (it - ts.begin() - 1);
    j = std::min(j, ts.size() - 2);
    std::size_t lo = (j >= 1) ? j - 1 : 0;
    std::size_t hi = std::min(lo + 3, ts.size() - 1);
    lo = (hi >= 3) ? hi - 3 : 0;
    double re = 0, im = 0;
    for (std::size_t m = lo; m <= hi; ++m) {
      double w = 1.0;
      for (std::size_t l = lo; l <= hi; ++l)
        if (l != m) w *= (t - ts[l]) / (ts[m] - ts[l]);
      re += w * re_[m](x);
      im += w * im_[m](x);
    }
    return {re, im};
  }

 private:
  const WaveField* f_;
  std::vector<double> xs_;
  std::vector<CubicSpline> re_, im_;
};

}  // namespace

WaveField pull_back(const TransformKernel& k, const WaveField& psi,
                    const std::vector<double>& xi_grid_hint, int n_xi,
                    const std::vector<double>& tau_slices) {
  KernelDense kd(k);
  FieldInterpolator interp(psi);
  Grid1D xg;
  if (xi_grid_hint.size() == 2) {
    xg.x0 = xi_grid_hint[0];
    xg.x1 = xi_grid_hint[1];
  } else {
    throw std::invalid_argument("pull_back: xi_grid_hint must be {xi_min, xi_max}");
  }
  xg.n = n_xi;

  WaveField out;
  out.x = xg;
  out.t = tau_slices;
  out.values.resize(tau_slices.size() * xg.n);
  out.eq = AutonomousStandardEq{};
  parallel_for(tau_slices.size(), [&](std::size_t it) {
    double tau = tau_slices[it];
    double t = kd.invert_gamma(tau);
    double mu = kd.mu(t);
    double be = kd.beta(t);
    double al = kd.alpha(t), de = kd.delta(t), ka = kd.kappa(t), ep = kd.eps(t);
    double sq = std::sqrt(mu);
    for (int i = 0; i < xg.n; ++i) {
      double xi = xg.x(i);
      double x = (xi - ep) / be;
      double S = al * x * x + de * x + ka;
      out.at(it, i) = sq * std::exp(-kI * S) * interp(x, t);
    }
  });
  return out;
}

cdouble NonlinearityMap::h(int index, double t) const {
  KernelDense kd(*kernel);
  double a = scen->a(t);
  double mu = kd.mu(t), be = kd.beta(t), al = kd.alpha(t), de = kd.delta(t), ep = kd.eps(t);
  double abs_mu = std::abs(mu);
  switch (index) {
    case 0: return d.d0 * a * be * be;
    case 1: return a * be * be * abs_mu * (d.d1 * be + (2.0 * al / be) * (d.d3 - d.d4));
    case 2: return a * be * be * abs_mu * (d.d1 * ep + d.d2 + (de / be) * (d.d3 - d.d4));
    case 3: return d.d3 * a * be * abs_mu;
    case 4: return d.d4 * a * be * abs_mu;
    case 5: return d.d5 * a * be * be * abs_mu * abs_mu;
  }
  throw std::out_of_range("NonlinearityMap::h index");
}

GeneralVariableEq NonlinearityMap::variable_equation() const {
  GeneralVariableEq eq;
  eq.scen = scen;
  NonlinearityMap self = *this;
  for (int j = 0; j < 6; ++j)
    eq.h[j] = [self, j](double t) { return self.h(j, t); };
  return eq;
}

NonlinearityMap nonlinearity_map(std::shared_ptr<const Scenario> scen,
                                 std::shared_ptr<const TransformKernel> kernel,
                                 const AutonomousStandardEq& d) {
  if (kernel->c0 != d.c0)
    throw std::invalid_argument("nonlinearity_map: kernel c0 does not match the equation c0");
  NonlinearityMap m;
  m.scen = std::move(scen);
  m.kernel = std::move(kernel);
  m.d = d;
  return m;
}

IntegrabilityH integrability_h(const Scenario& scen, const TransformKernel& k,
                               const FundamentalPair& pair, double h0, double p) {
  IntegrabilityH out;
  double b0 = k.init.beta, mu0 = k.init.mu;
  for (std::size_t i = 0; i < k.t.size(); ++i) {
    if (!k.valid[i]) continue;
    double t = k.t[i];
    double mu = k.mu[i];
    if (!(mu > 0)) throw std::domain_error("integrability_h: mu must stay positive");
    double a = scen.a(t);
    double lam = pair.lambda[i];
    double h1 = h0 * a * k.beta[i] * k.beta[i] * std::pow(mu, 0.5 * p);
    double h2 = h0 * b0 * b0 * mu0 * mu0 * a * lam * lam / std::pow(mu, 2.0 - 0.5 * p);
    out.t.push_back(t);
    out.h_first_form.push_back(h1);
    out.h_second_form.push_back(h2);
    out.forms_disagreement_sup =
        std::max(out.forms_disagreement_sup, std::abs(h1 - h2) / std::max(1.0, std::abs(h1)));
  }
  return out;
}

AdiabaticResidual adiabatic_residual(const Scenario& scen, const TransformKernel& k,
                                     const std::function<double(double)>& h, double p) {
  AdiabaticResidual out;
  std::vector<double> ratio(k.t.size(), 0.0);
  std::vector<std::uint8_t> ok(k.t.size(), 0);
  for (std::size_t i = 0; i < k.t.size(); ++i) {
    if (!k.valid[i]) continue;
    double t = k.t[i];
    double denom = scen.a(t) * k.beta[i] * k.beta[i] * std::pow(k.mu[i], 0.5 * p);
    if (denom == 0.0) continue;
    ratio[i] = h(t) / denom;
    ok[i] = 1;
  }
  for (std::size_t i = 1; i + 1 < k.t.size(); ++i) {
    if (!ok[i - 1] || !ok[i + 1]) continue;
    double dt = k.t[i + 1] - k.t[i - 1];
    double d = (ratio[i + 1] - ratio[i - 1]) / dt;
    out.t.push_back(k.t[i]);
    out.value.push_back(d);
    out.sup = std::max(out.sup, std::abs(d));
  }
  return out;
}

bool painleve_property(double d3, double d4, double d5, double tol) {
  double rhs = d4 * (2.0 * d4 - d3) / 4.0;
  double scale = std::max({std::abs(d5), std::abs(rhs), 1.0});
  return std::abs(d5 - rhs) <= tol * scale;
}

std::vector<cdouble> kundu_gauge(const std::vector<double>& xi, const std::vector<cdouble>& chi,
                                 double nu, double xi0) {
  if (xi.size() != chi.size()) throw std::invalid_argument("kundu_gauge: size mismatch");
  std::vector<double> dens(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) dens[i] = std::norm(chi[i]);
  std::vector<double> cum = cumtrapz(xi, dens);
  // shift the accumulated integral so it vanishes at xi0
  double at0 = 0.0;
  if (xi0 <= xi.front())
    at0 = 0.0;
  else if (xi0 >= xi.back())
    at0 = cum.back();
  else {
    auto it = std::upper_bound(xi.begin(), xi.end(), xi0);
    std::size_t i = it - xi.begin() - 1;
    double w = (xi0 - xi[i]) / (xi[i + 1] - xi[i]);
    at0 = (1 - w) * cum[i] + w * cum[i + 1];
  }
  std::vector<cdouble> out(chi.size());
  for (std::size_t i = 0; i < chi.size(); ++i)
    out[i] = chi[i] * std::exp(kI * nu * (cum[i] - at0));
  return out;
}

}  // namespace nlsframes
