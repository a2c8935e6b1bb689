#include "nlsframes/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsframes {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Stepper {
  const OdeRhs& rhs;
  std::size_t n;
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;

  Stepper(const OdeRhs& f, std::size_t dim)
      : rhs(f), n(dim), k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), ytmp(dim),
        ynew(dim), yerr(dim) {}

  // k1 must hold rhs(t, y) on entry (FSAL). Returns scaled error norm.
  double step(double t, std::span<const double> y, double h, const OdeOptions& opt) {
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double q = e / sk;
      err += q * q;
    }
    return std::sqrt(err / n);
  }

  void fill_dense(OdeStep& st, double t, double h, std::span<const double> y) {
    st.t0 = t;
    st.t1 = t + h;
    st.y0.assign(y.begin(), y.end());
    st.y1.assign(ynew.begin(), ynew.end());
    st.rcont1.resize(n);
    st.rcont2.resize(n);
    st.rcont3.resize(n);
    st.rcont4.resize(n);
    st.rcont5.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      st.rcont1[i] = y[i];
      double ydiff = ynew[i] - y[i];
      st.rcont2[i] = ydiff;
      double bspl = h * k1[i] - ydiff;
      st.rcont3[i] = bspl;
      st.rcont4[i] = ydiff - h * k7[i] - bspl;
      st.rcont5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                          d7 * k7[i]);
    }
  }
};

double initial_step(const OdeRhs& rhs, double t0, std::span<const double> y0,
                    std::span<const double> f0, double dir, double span, const OdeOptions& opt) {
  double dnf = 0, dny = 0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    double sk = opt.atol + opt.rtol * std::abs(y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  h = std::min(h, span);
  std::vector<double> y1(y0.size()), f1(y0.size());
  for (std::size_t i = 0; i < y0.size(); ++i) y1[i] = y0[i] + dir * h * f0[i];
  rhs(t0 + dir * h, y1, f1);
  double der2 = 0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    double sk = opt.atol + opt.rtol * std::abs(y0[i]);
    double q = (f1[i] - f0[i]) / sk;
    der2 += q * q;
  }
  der2 = std::sqrt(der2) / h;
  double der12 = std::max(der2, std::sqrt(dnf));
  double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100 * h, h1, span});
}

}  // namespace

void OdeStep::eval(double t, std::span<double> out) const {
  double h = t1 - t0;
  double s = (t - t0) / h, s1 = 1.0 - s;
  for (std::size_t i = 0; i < y0.size(); ++i)
    out[i] = rcont1[i] +
             s * (rcont2[i] + s1 * (rcont3[i] + s * (rcont4[i] + s1 * rcont5[i])));
}

static OdeHaltInfo integrate_core(const OdeRhs& rhs, double t0, double t_end,
                                  std::vector<double>& y, const OdeOptions& opt,
                                  std::vector<OdeStep>* steps,
                                  std::span<const double> grid,
                                  const std::function<void(std::size_t, double, std::span<const double>)>& on_node,
                                  const std::function<bool(double, std::span<const double>)>& halt) {
  OdeHaltInfo info;
  const std::size_t n = y.size();
  const double dir = (t_end >= t0) ? 1.0 : -1.0;
  const double span = std::abs(t_end - t0);
  if (span == 0.0) return info;

  Stepper st(rhs, n);
  double t = t0;
  rhs(t, y, st.k1);

  std::size_t next_node = 0;
  if (!grid.empty()) {
    if (on_node) on_node(0, t, y);
    next_node = 1;
  }

  double h_max = opt.h_max > 0 ? opt.h_max : span;
  double h = opt.h_init > 0 ? opt.h_init : initial_step(rhs, t0, y, st.k1, dir, h_max, opt);
  const double safety = 0.9, fac_min = 0.2, fac_max = 5.0;

  for (long nstep = 0; nstep < opt.max_steps; ++nstep) {
    if (dir * (t - t_end) >= 0.0) return info;
    bool clipped_to_node = false;
    double h_try = std::min(h, h_max);
    // Land exactly on the next requested node / the endpoint.
    double t_limit = t_end;
    if (!grid.empty() && next_node < grid.size()) t_limit = grid[next_node];
    if (dir * (t + dir * h_try - t_limit) > 0.0) {
      h_try = std::abs(t_limit - t);
      clipped_to_node = true;
    }
    if (h_try < 1e-14 * std::max(1.0, std::abs(t))) {
      // Degenerate interval; jump.
      t = t_limit;
    } else {
      double err = st.step(t, y, dir * h_try, opt);
      if (err > 1.0) {
        double fac = std::max(fac_min, safety * std::pow(err, -0.2));
        h = h_try * fac;
        if (h < 1e-15 * std::max(1.0, std::abs(t))) {
          info.halted = true;
          info.t = t;
          info.reason = "step size collapsed";
          return info;
        }
        continue;
      }
      if (steps) {
        OdeStep rec;
        st.fill_dense(rec, t, dir * h_try, y);
        steps->push_back(std::move(rec));
      }
      t = clipped_to_node ? t_limit : t + dir * h_try;
      y.assign(st.ynew.begin(), st.ynew.end());
      st.k1.assign(st.k7.begin(), st.k7.end());  // FSAL
      double fac = std::clamp(safety * std::pow(std::max(err, 1e-16), -0.2), fac_min, fac_max);
      h = h_try * fac;
    }
    if (halt && halt(t, y)) {
      info.halted = true;
      info.t = t;
      info.reason = "halt condition";
      return info;
    }
    while (!grid.empty() && next_node < grid.size() &&
           dir * (t - grid[next_node]) >= -1e-14 * std::max(1.0, std::abs(t))) {
      if (on_node) on_node(next_node, grid[next_node], y);
      ++next_node;
    }
  }
  throw std::runtime_error("ode: max step count exceeded");
}

OdeHaltInfo integrate_on_grid(const OdeRhs& rhs, std::span<const double> grid,
                              std::vector<double> y0, const OdeOptions& opt,
                              const std::function<void(std::size_t, double, std::span<const double>)>& on_node,
                              const std::function<bool(double, std::span<const double>)>& halt) {
  if (grid.size() < 2) throw std::invalid_argument("integrate_on_grid: need >= 2 nodes");
  return integrate_core(rhs, grid.front(), grid.back(), y0, opt, nullptr, grid, on_node, halt);
}

OdeHaltInfo integrate_adaptive(const OdeRhs& rhs, double t0, double t_end, std::vector<double>& y,
                               const OdeOptions& opt, std::vector<OdeStep>* steps,
                               const std::function<bool(double, std::span<const double>)>& halt) {
  return integrate_core(rhs, t0, t_end, y, opt, steps, {}, nullptr, halt);
}

}  // namespace nlsframes
