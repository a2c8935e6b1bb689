#include "nlsframes/observe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "nlsframes/fft.hpp"
#include "nlsframes/specfun.hpp"
#include "nlsframes/util.hpp"

namespace nlsframes {

namespace {
constexpr double kPi = std::numbers::pi;
using cdouble = std::complex<double>;

std::vector<cdouble> spectral_derivative(const std::vector<cdouble>& psi, double L) {
  std::vector<cdouble> a = psi;
  fft(a, false);
  auto ks = fft_wavenumbers(a.size(), L);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= cdouble(0.0, ks[i]);
  fft(a, true);
  return a;
}

struct EnergyVisitor {
  double p2, x2, mean4, mean2;
  double operator()(const QuinticFreeEq&) const { return p2 - 0.25 * mean4; }
  double operator()(const QuinticTrapEq&) const { return p2 + x2 - 0.25 * mean4; }
  double operator()(const LinearFreeEq&) const { return p2; }
  double operator()(const CubicEq& e) const { return p2 + 0.5 * e.sign * mean2; }
  template <typename Other>
  double operator()(const Other&) const {
    return p2;
  }
};

double energy_for(const EquationSpec& eq, double p2, double x2, double mean4, double mean2) {
  return std::visit(EnergyVisitor{p2, x2, mean4, mean2}, eq);
}

}  // namespace

MomentReport moments(const std::vector<cdouble>& psi, const Grid1D& g, const EquationSpec& eq) {
  if (static_cast<int>(psi.size()) != g.n) throw std::invalid_argument("moments: size mismatch");
  if (!is_power_of_two(psi.size()))
    throw std::invalid_argument("moments: grid size must be a power of two");
  const double dx = g.dx();
  MomentReport r;
  r.edge_magnitude = std::max(std::abs(psi.front()), std::abs(psi.back()));

  auto dpsi = spectral_derivative(psi, g.length());
  double norm = 0, xm = 0, x2m = 0, pm = 0, p2m = 0, m4 = 0, m2 = 0;
  for (int i = 0; i < g.n; ++i) {
    double x = g.x(i);
    double w = std::norm(psi[i]);
    norm += w;
    xm += x * w;
    x2m += x * x * w;
    p2m += std::norm(dpsi[i]);
    pm += (std::conj(psi[i]) * cdouble(0.0, -1.0) * dpsi[i]).real();
    m4 += w * w * w;  // |psi|^6 integrand: expectation of |psi|^4
    m2 += w * w;
  }
  norm *= dx;
  if (norm <= 0) throw std::domain_error("moments: empty field");
  xm *= dx / norm;
  x2m *= dx / norm;
  pm *= dx / norm;
  p2m *= dx / norm;
  m4 *= dx / norm;
  m2 *= dx / norm;

  r.norm = norm;
  r.x_mean = xm;
  r.p_mean = pm;
  r.x_var = x2m - xm * xm;
  r.p_var = p2m - pm * pm;
  r.heisenberg = r.x_var * r.p_var;
  r.energy = energy_for(eq, p2m, x2m, m4, m2);
  return r;
}

SpectrumResult spectrum(const std::vector<cdouble>& psi, const Grid1D& g) {
  if (!is_power_of_two(psi.size()))
    throw std::invalid_argument("spectrum: grid size must be a power of two");
  const std::size_t n = psi.size();
  const double dx = g.dx();
  std::vector<cdouble> a = psi;
  fft(a, false);
  auto ks = fft_wavenumbers(n, g.length());
  SpectrumResult out;
  out.p.resize(n);
  out.B.resize(n);
  // B(p) = (1/sqrt(2 pi)) int e^{-ipx} psi dx = dx/sqrt(2 pi) e^{-i p x0} FFT[psi](p)
  for (std::size_t j = 0; j < n; ++j) {
    out.p[j] = ks[j];
    out.B[j] = dx / std::sqrt(2.0 * kPi) * std::exp(cdouble(0.0, -ks[j] * g.x0)) * a[j];
  }
  // reorder ascending in p
  std::vector<std::size_t> idx(n);
  for (std::size_t j = 0; j < n; ++j) idx[j] = j;
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return out.p[i] < out.p[j]; });
  std::vector<double> ps(n);
  std::vector<cdouble> Bs(n);
  for (std::size_t j = 0; j < n; ++j) {
    ps[j] = out.p[idx[j]];
    Bs[j] = out.B[idx[j]];
  }
  out.p = std::move(ps);
  out.B = std::move(Bs);

  double norm_x = 0;
  for (auto& v : psi) norm_x += std::norm(v);
  norm_x *= dx;
  double dp = out.p[1] - out.p[0];
  double norm_p = 0, tail = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double e = std::norm(out.B[j]);
    norm_p += e;
    if (j < n / 8 || j >= n - n / 8) tail += e;
  }
  norm_p *= dp;
  tail *= dp;
  out.parseval_mismatch = std::abs(norm_p - norm_x);
  out.tail_energy_fraction = tail / std::max(norm_p, 1e-300);
  return out;
}

WignerGrid wigner_numeric(const std::vector<cdouble>& psi, const Grid1D& g,
                          const std::vector<double>& x_eval, const std::vector<double>& p_eval) {
  const int n = g.n;
  const double dx = g.dx();
  WignerGrid out;
  out.x = x_eval;
  out.p = p_eval;
  out.W.assign(x_eval.size() * p_eval.size(), 0.0);
  std::vector<double> imag_res(x_eval.size(), 0.0);

  parallel_for(x_eval.size(), [&](std::size_t ix) {
    // evaluation is restricted to grid nodes; the snapped coordinate is recorded
    long ic = std::lround((x_eval[ix] - g.x0) / dx);
    if (ic < 0 || ic >= n) throw std::out_of_range("wigner_numeric: x outside the grid");
    out.x[ix] = g.x(static_cast<int>(ic));
    long m = std::min<long>(ic, n - 1 - ic);  // half-window in nodes
    for (std::size_t ip = 0; ip < p_eval.size(); ++ip) {
      double p = p_eval[ip];
      // y_j = 2 j dx; psi*(x + y/2) psi(x - y/2) = psi*(x_{ic+j}) psi(x_{ic-j})
      cdouble acc = std::conj(psi[ic]) * psi[ic];
      for (long j = 1; j <= m; ++j) {
        cdouble prod_p = std::conj(psi[ic + j]) * psi[ic - j];
        cdouble prod_m = std::conj(psi[ic - j]) * psi[ic + j];
        double y = 2.0 * j * dx;
        double wj = (j == m) ? 0.5 : 1.0;
        acc += wj * (prod_p * std::exp(cdouble(0, p * y)) + prod_m * std::exp(cdouble(0, -p * y)));
      }
      cdouble val = acc * (2.0 * dx) / (2.0 * kPi);
      out.W[ix * p_eval.size() + ip] = val.real();
      imag_res[ix] = std::max(imag_res[ix], std::abs(val.imag()));
    }
  });
  for (double r : imag_res) out.imag_residual_sup = std::max(out.imag_residual_sup, r);

  // marginal / mass checks on the evaluation grids (trapezoid in p)
  if (p_eval.size() >= 2) {
    double dp = p_eval[1] - p_eval[0];
    double mass = 0;
    for (std::size_t ix = 0; ix < x_eval.size(); ++ix) {
      double marg = 0;
      for (std::size_t ip = 0; ip < p_eval.size(); ++ip) {
        double w = (ip == 0 || ip + 1 == p_eval.size()) ? 0.5 : 1.0;
        marg += w * out.at(ix, ip);
      }
      marg *= dp;
      long ic = std::lround((x_eval[ix] - g.x0) / dx);
      out.marginal_x_mismatch_sup =
          std::max(out.marginal_x_mismatch_sup, std::abs(marg - std::norm(psi[ic])));
      mass += marg;
    }
    if (x_eval.size() >= 2) {
      double dxe = x_eval[1] - x_eval[0];
      mass *= dxe;
      double norm = 0;
      for (auto& v : psi) norm += std::norm(v);
      norm *= dx;
      // mass over the evaluation window only approximates the full norm when
      // the window covers the support
      out.mass_mismatch = std::abs(mass - norm);
    }
  }
  return out;
}

void wigner_parameters(const WignerFamily& fam, double x, double p, double t, double& w,
                       double& theta) {
  switch (fam.kind) {
    case WignerFamily::osc_pulse: {
      double c = std::cos(2 * t), s = std::sin(2 * t);
      if (c == 0) throw std::domain_error("wigner: turning point");
      w = (p * c + x * s - fam.v) / (2.0 * fam.k);
      theta = (2.0 * fam.k / c) * (x - fam.v * s);
      return;
    }
    case WignerFamily::osc_pulse_general: {
      double c = std::cos(2 * t), s = std::sin(2 * t);
      double q = 2.0 * fam.alpha0 * s + c;
      if (q == 0) throw std::domain_error("wigner: blow-up time");
      w = ((p - 2.0 * fam.alpha0 * x) * c + (2.0 * fam.alpha0 * p + x) * s - fam.delta0 -
           fam.v * fam.beta0) /
          (2.0 * fam.k * fam.beta0);
      theta = 2.0 * fam.k *
              (fam.beta0 * (x - (fam.delta0 + fam.v * fam.beta0) * s) / q + fam.eps0);
      return;
    }
    case WignerFamily::quintic_pulse: {
      w = (p - 0.5 * fam.v) / fam.k;
      theta = fam.k * (x - fam.v * t);
      return;
    }
  }
  throw std::logic_error("wigner_parameters: bad family");
}

double wigner_closed(const WignerFamily& fam, double x, double p, double t) {
  double w, theta;
  wigner_parameters(fam, x, p, t, w, theta);
  return conical_2f1(w, theta) / std::cosh(kPi * w);
}

void write_wigner_csv(const WignerGrid& w, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path);
  std::fprintf(fp, "x,p,W\n");
  for (std::size_t ix = 0; ix < w.x.size(); ++ix)
    for (std::size_t ip = 0; ip < w.p.size(); ++ip)
      std::fprintf(fp, "%.17g,%.17g,%.17g\n", w.x[ix], w.p[ip], w.at(ix, ip));
  std::fclose(fp);
}

}  // namespace nlsframes
