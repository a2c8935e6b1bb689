#include "nlsframes/painleve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "nlsframes/ode.hpp"
#include "nlsframes/specfun.hpp"
#include "nlsframes/spline.hpp"

namespace nlsframes {

namespace {
constexpr double kPi = std::numbers::pi;

double pii_rhs(PiiSign sign, double z, double F) {
  double cubic = 2.0 * F * F * F;
  return z * F + (sign == PiiSign::defocusing ? cubic : -cubic);
}
}  // namespace

double PiiProfile::eval(double zz) const {
  // to the right of the seed the profile continues as its Airy asymptote
  if (zz > z.back()) return k0 * airy_ai(zz);
  if (zz < z.front()) throw std::out_of_range("pii profile evaluated left of its z-range");
  auto it = std::upper_bound(z.begin(), z.end(), zz);
  std::size_t i = (it == z.begin()) ? 0 : (it - z.begin() - 1);
  i = std::min(i, z.size() - 2);
  return hermite_eval(z[i], z[i + 1], F[i], F[i + 1], dF[i], dF[i + 1], zz);
}

double PiiProfile::eval_deriv(double zz) const {
  auto it = std::upper_bound(z.begin(), z.end(), zz);
  std::size_t i = (it == z.begin()) ? 0 : (it - z.begin() - 1);
  i = std::min(i, z.size() - 2);
  return hermite_deriv(z[i], z[i + 1], F[i], F[i + 1], dF[i], dF[i + 1], zz);
}

PiiSeed seed_from_airy(double k0, double z_plus) {
  if (z_plus < 6.0) throw std::invalid_argument("seed_from_airy: z_plus must be >= 6");
  return {z_plus, k0 * airy_ai(z_plus), k0 * airy_ai_prime(z_plus)};
}

PiiProfile integrate_pii(PiiSign sign, const PiiSeed& seed, double z_to, double dz_grid) {
  if (!(seed.z > z_to)) throw std::invalid_argument("integrate_pii: integrates leftward only");
  PiiProfile prof;
  prof.sign = sign;
  prof.k0 = (airy_ai(seed.z) != 0.0) ? seed.F / airy_ai(seed.z) : 0.0;

  long n = std::lround((seed.z - z_to) / dz_grid);
  n = std::max<long>(n, 16);
  std::vector<double> grid(n + 1);
  for (long i = 0; i <= n; ++i) grid[i] = seed.z - dz_grid * i;  // decreasing

  // integrate in s = -z to keep the grid increasing for the stepper
  std::vector<double> sgrid(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) sgrid[i] = -grid[i];

  std::vector<double> Fv, dFv, zv;
  Fv.reserve(grid.size());
  dFv.reserve(grid.size());
  zv.reserve(grid.size());

  OdeRhs rhs = [sign](double s, std::span<const double> y, std::span<double> dy) {
    // z = -s, dF/ds = -F', dF'/ds = -F''
    dy[0] = -y[1];
    dy[1] = -pii_rhs(sign, -s, y[0]);
  };
  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  auto halt = [](double, std::span<const double> y) { return std::abs(y[0]) > 1e6; };
  std::vector<double> y0 = {seed.F, seed.dF};
  OdeHaltInfo hi = integrate_on_grid(rhs, sgrid, y0, opt,
                                     [&](std::size_t, double s, std::span<const double> y) {
                                       zv.push_back(-s);
                                       Fv.push_back(y[0]);
                                       dFv.push_back(y[1]);
                                     },
                                     halt);

  // store ascending in z; the state vector already carries dF/dz
  std::reverse(zv.begin(), zv.end());
  std::reverse(Fv.begin(), Fv.end());
  std::reverse(dFv.begin(), dFv.end());
  prof.z = std::move(zv);
  prof.F = std::move(Fv);
  prof.dF = std::move(dFv);

  if (hi.halted) {
    // Pole: near it F ~ strength/(z - z_pole), so 1/F is locally linear in z.
    PiiPole pole;
    std::vector<double> zz, Fz;
    for (std::size_t i = 0; i < prof.z.size(); ++i) {
      if (std::abs(prof.F[i]) > 30.0) {
        zz.push_back(prof.z[i]);
        Fz.push_back(prof.F[i]);
      }
    }
    if (zz.size() >= 6) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < zz.size(); ++i) {
        double inv = 1.0 / Fz[i];
        sx += zz[i];
        sy += inv;
        sxx += zz[i] * zz[i];
        sxy += zz[i] * inv;
      }
      double m = static_cast<double>(zz.size());
      double p1 = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      double p0 = (sy - p1 * sx) / m;
      pole.z = -p0 / p1;
      pole.strength = 1.0 / p1;
      // local exponent: least-squares slope of ln|F| against ln|z - z_pole|
      double su = 0, sv = 0, suu = 0, suv = 0;
      for (std::size_t i = 0; i < zz.size(); ++i) {
        double u = std::log(std::abs(zz[i] - pole.z));
        double v = std::log(std::abs(Fz[i]));
        su += u;
        sv += v;
        suu += u * u;
        suv += u * v;
      }
      pole.exponent = (m * suv - su * sv) / (m * suu - su * su);
      prof.pole = pole;
    }
  }
  return prof;
}

TailFit fit_oscillatory_tail(const PiiProfile& profile, double z_a, double z_b) {
  if (z_a > z_b) std::swap(z_a, z_b);
  if (z_b > -10.0) throw std::invalid_argument("tail window must lie in z <= -10");
  if (z_a < profile.z_min()) throw std::invalid_argument("tail window outside the profile");

  const double log_sign = (profile.sign == PiiSign::defocusing) ? -1.0 : +1.0;
  std::vector<double> zs, Fs;
  for (double z = z_a; z <= z_b + 1e-12; z += 0.01) {
    zs.push_back(z);
    Fs.push_back(profile.eval(z));
  }

  TailFit fit;
  double r = 0.3;  // starting guess
  double P = 0, Q = 0;
  for (int it = 0; it < 12; ++it) {
    // linear LS for F ~ |z|^{-1/4} (P sin s + Q cos s), s = (2/3)|z|^{3/2} + log_sign*(3/4) r^2 ln|z|
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      double az = std::abs(zs[i]);
      double s = (2.0 / 3.0) * std::pow(az, 1.5) + log_sign * 0.75 * r * r * std::log(az);
      double w = std::pow(az, -0.25);
      double bs = w * std::sin(s), bc = w * std::cos(s);
      a11 += bs * bs;
      a12 += bs * bc;
      a22 += bc * bc;
      b1 += bs * Fs[i];
      b2 += bc * Fs[i];
    }
    double det = a11 * a22 - a12 * a12;
    P = (b1 * a22 - b2 * a12) / det;
    Q = (a11 * b2 - a12 * b1) / det;
    double r_new = std::sqrt(P * P + Q * Q);
    fit.iterations = it + 1;
    if (std::abs(r_new - r) < 1e-6 * std::max(1.0, r_new)) {
      r = r_new;
      break;
    }
    r = r_new;
  }
  fit.r = r;
  // F = r w sin(s - theta0) = w (r cos(theta0) sin s - r sin(theta0) cos s)
  fit.theta0 = std::atan2(-Q, P);
  double rms = 0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    double az = std::abs(zs[i]);
    double s = (2.0 / 3.0) * std::pow(az, 1.5) + log_sign * 0.75 * r * r * std::log(az);
    double w = std::pow(az, -0.25);
    double model = w * (P * std::sin(s) + Q * std::cos(s));
    rms += (model - Fs[i]) * (model - Fs[i]);
  }
  fit.rms = std::sqrt(rms / zs.size());
  return fit;
}

ConnectionData connect_defocusing(double k0) {
  if (!(std::abs(k0) < 1.0) || k0 == 0.0)
    throw std::domain_error("connect_defocusing: requires 0 < |k0| < 1");
  ConnectionData c;
  c.branch = ConnectionBranch::defocusing;
  c.k0 = k0;
  double r2 = -std::log(1.0 - k0 * k0) / kPi;
  c.r = std::sqrt(r2);
  c.theta0 = 1.5 * r2 * std::log(2.0) + arg_gamma(std::complex<double>(1.0, -0.5 * r2)) +
             0.25 * kPi * (1.0 - 2.0 * ((k0 > 0) - (k0 < 0)));
  return c;
}

ConnectionData connect_focusing(double r, double theta0, double quant_tol) {
  if (r == 0.0) throw std::domain_error("connect_focusing: r must be nonzero");
  ConnectionData c;
  c.r = r;
  c.theta0 = theta0;
  double r2 = r * r;
  double phase = theta0 + 1.5 * r2 * std::log(2.0) - 0.25 * kPi -
                 arg_gamma(std::complex<double>(0.0, 0.5 * r2));
  double n_real = phase / kPi;
  double n_round = std::round(n_real);
  if (std::abs(phase - n_round * kPi) <= quant_tol) {
    c.branch = ConnectionBranch::focusing_quantized;
    c.n = static_cast<int>(n_round);
    double k0_abs = std::sqrt(std::exp(kPi * r2) - 1.0);
    c.k0 = ((c.n % 2 == 0) ? 1.0 : -1.0) * k0_abs;
    return c;
  }
  c.branch = ConnectionBranch::focusing_generic;
  double mod = std::sqrt(std::exp(kPi * r2) - 1.0);
  double ang = 1.5 * r2 * std::log(2.0) - 0.25 * kPi + theta0 -
               arg_gamma(std::complex<double>(0.0, 0.5 * r2));
  c.xi = std::polar(mod, ang);
  double im = c.xi.imag();
  if (im == 0.0) throw std::domain_error("connect_focusing: Im xi = 0, beta undefined");
  c.alpha_conn = (im > 0) ? -1.0 : 1.0;
  double beta2 = std::log((1.0 + std::norm(c.xi)) / (2.0 * std::abs(im))) / kPi;
  c.beta_conn = std::sqrt(std::max(beta2, 0.0));
  c.theta_conn = -0.75 * kPi - 3.5 * beta2 * std::log(2.0) + std::arg(1.0 + c.xi * c.xi) +
                 arg_gamma(std::complex<double>(0.0, beta2));
  return c;
}

PivResidual piv_residual(const std::vector<double>& x, const std::vector<double>& u, int n) {
  if (x.size() != u.size() || x.size() < 9)
    throw std::invalid_argument("piv_residual: needs >= 9 samples");
  double h = x[1] - x[0];
  for (std::size_t i = 1; i + 1 < x.size(); ++i)
    if (std::abs((x[i + 1] - x[i]) - h) > 1e-9 * h)
      throw std::invalid_argument("piv_residual: grid must be uniform");
  if (h > 0.05) throw std::invalid_argument("piv_residual: grid step must be <= 0.05");

  PivResidual out;
  double l2 = 0;
  std::size_t count = 0;
  for (std::size_t i = 2; i + 2 < x.size(); ++i) {
    double upp = (-u[i + 2] + 16 * u[i + 1] - 30 * u[i] + 16 * u[i - 1] - u[i - 2]) /
                 (12 * h * h);
    double xi = x[i], ui = u[i];
    double t1 = 3.0 * std::pow(ui, 5);
    double t2 = 2.0 * xi * ui * ui * ui;
    double t3 = (0.25 * xi * xi - n - 0.5) * ui;
    double res = upp - t1 - t2 - t3;
    double scale = std::max({std::abs(upp), std::abs(t1), std::abs(t2), std::abs(t3), 1e-30});
    double rel = std::abs(res) / scale;
    out.sup = std::max(out.sup, rel);
    l2 += rel * rel;
    ++count;
  }
  out.l2 = std::sqrt(l2 / count);
  return out;
}

std::string connection_json(const ConnectionData& c) {
  nlohmann::json j;
  switch (c.branch) {
    case ConnectionBranch::defocusing: j["branch"] = "defocusing"; break;
    case ConnectionBranch::focusing_quantized: j["branch"] = "focusing_quantized"; break;
    case ConnectionBranch::focusing_generic: j["branch"] = "focusing_generic"; break;
  }
  j["r"] = c.r;
  j["r2"] = c.r * c.r;
  j["theta0"] = c.theta0;
  if (c.branch != ConnectionBranch::focusing_generic) {
    j["k0"] = c.k0;
    if (c.branch == ConnectionBranch::focusing_quantized) j["n"] = c.n;
  } else {
    j["alpha"] = c.alpha_conn;
    j["beta"] = c.beta_conn;
    j["theta"] = c.theta_conn;
    j["xi"] = {c.xi.real(), c.xi.imag()};
  }
  return j.dump(2);
}

}  // namespace nlsframes
