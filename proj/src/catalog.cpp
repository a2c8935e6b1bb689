#include "nlsframes/catalog.hpp"

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
using cdouble = std::complex<double>;
const cdouble kI{0.0, 1.0};

double cbrt_pos(double g) {
  if (!(g > 0)) throw std::invalid_argument("acceleration parameter must be positive");
  return std::cbrt(g);
}
}  // namespace

std::string Solution::descriptor_json() const {
  nlohmann::json j;
  j["family"] = family();
  j["equation"] = equation_name(equation());
  j["square_integrable"] = square_integrable();
  return j.dump(2);
}

// --- Painleve-II / Airy packets ----------------------------------------------

namespace {

class PiiPacket final : public Solution {
 public:
  PiiPacket(double g, double v, std::shared_ptr<const PiiProfile> prof)
      : g_(g), v_(v), g13_(cbrt_pos(g)), prof_(std::move(prof)) {}
  cdouble eval(double x, double t) const override {
    double xi = x - v_ * t;
    double z = g13_ * (xi - g_ * t * t);
    double phase = 0.5 * v_ * (x - 0.5 * v_ * t) + g_ * (xi - 2.0 * g_ * t * t / 3.0) * t;
    return std::exp(kI * phase) * g13_ * prof_->eval(z);
  }
  EquationSpec equation() const override {
    return CubicEq{prof_->sign == PiiSign::defocusing ? +1 : -1};
  }
  std::string family() const override { return "pii_packet"; }

 private:
  double g_, v_, g13_;
  std::shared_ptr<const PiiProfile> prof_;
};

class AiryBerry final : public Solution {
 public:
  AiryBerry(double g, double v) : g_(g), v_(v), g13_(cbrt_pos(g)) {}
  cdouble eval(double x, double t) const override {
    double xi = x - v_ * t;
    double z = g13_ * (xi - g_ * t * t);
    double phase = 0.5 * v_ * (x - 0.5 * v_ * t) + g_ * (xi - 2.0 * g_ * t * t / 3.0) * t;
    return std::exp(kI * phase) * g13_ * airy_ai(z);
  }
  EquationSpec equation() const override { return LinearFreeEq{}; }
  std::string family() const override { return "airy_berry"; }

 private:
  double g_, v_, g13_;
};

class AiryExpansion final : public Solution {
 public:
  AiryExpansion(double g, double t1) : g_(g), t1_(t1), g13_(cbrt_pos(g)) {}
  cdouble eval(double x, double t) const override {
    if (t1_ == 0.0) {
      if (!(t > 0)) throw std::domain_error("degenerate airy expansion needs t > 0");
      double phase = (x * x + (x + g_ / (12.0 * t)) * g_ / (2.0 * t)) / (4.0 * t);
      double arg = -(g13_ / (2.0 * t)) * (x + g_ / (8.0 * t));
      return std::exp(kI * phase) / std::sqrt(2.0 * t) * g13_ * airy_ai(arg);
    }
    if (!(t < t1_)) throw std::domain_error("airy expansion valid for t < t1");
    double den = t1_ - t;
    double phase = g_ * (x - (2.0 * g_ / 3.0) * t1_ * t * t / den) * t1_ * t1_ * t / (den * den) -
                   x * x / (4.0 * den);
    double arg = g13_ * (x - g_ * t1_ * t * t / den) * t1_ / den;
    return std::sqrt(std::abs(t1_) / den) * std::exp(kI * phase) * g13_ * airy_ai(arg);
  }
  EquationSpec equation() const override { return LinearFreeEq{}; }
  std::string family() const override { return "airy_expansion"; }
  std::vector<double> singular_times(double t0, double t1) const override {
    double ts = (t1_ == 0.0) ? 0.0 : t1_;
    if (ts >= t0 && ts <= t1) return {ts};
    return {};
  }

 private:
  double g_, t1_, g13_;
};

class ConstVelocityPacket final : public Solution {
 public:
  ConstVelocityPacket(double k, double v, std::shared_ptr<const PiiProfile> prof)
      : k_(k), v_(v), g_(2.0 * k), g13_(cbrt_pos(2.0 * k)), prof_(std::move(prof)) {}
  cdouble eval(double x, double t) const override {
    double phase = 0.5 * v_ * (x - 0.5 * v_ * t) - 0.5 * g_ * v_ * t * t;
    return std::exp(kI * phase) * g13_ * prof_->eval(g13_ * (x - v_ * t));
  }
  EquationSpec equation() const override { return CubicLinearPotentialEq{k_}; }
  std::string family() const override { return "const_velocity"; }

 private:
  double k_, v_, g_, g13_;
  std::shared_ptr<const PiiProfile> prof_;
};

}  // namespace

SolutionHandle pii_packet(double g, double v, std::shared_ptr<const PiiProfile> profile) {
  return std::make_shared<PiiPacket>(g, v, std::move(profile));
}
SolutionHandle airy_berry(double g, double v) { return std::make_shared<AiryBerry>(g, v); }
SolutionHandle airy_expansion(double g, double t1) {
  return std::make_shared<AiryExpansion>(g, t1);
}
SolutionHandle const_velocity_packet(double k, double v,
                                     std::shared_ptr<const PiiProfile> profile) {
  if (profile->sign != PiiSign::defocusing)
    throw std::invalid_argument("const_velocity_packet: defocusing profile required");
  return std::make_shared<ConstVelocityPacket>(k, v, std::move(profile));
}

// --- quintic family -----------------------------------------------------------

namespace {

class QuinticPulse final : public Solution {
 public:
  QuinticPulse(double phi, double v, double k) : phi_(phi), v_(v), k_(k) {
    if (!(k > 0)) throw std::invalid_argument("quintic_pulse: k > 0 required");
  }
  cdouble eval(double x, double t) const override {
    double amp = std::sqrt(k_ / std::cosh(k_ * (x - v_ * t)));
    double phase = phi_ + 0.5 * v_ * x + 0.25 * (k_ * k_ - v_ * v_) * t;
    return amp * std::exp(kI * phase);
  }
  EquationSpec equation() const override { return QuinticFreeEq{+1}; }
  std::string family() const override { return "quintic_pulse"; }
  bool square_integrable() const override { return true; }

 private:
  double phi_, v_, k_;
};

class QuinticSource final : public Solution {
 public:
  QuinticSource(double phi, double v, double r) : phi_(phi), v_(v), r_(r) {
    if (!(r > 0)) throw std::invalid_argument("quintic_source: r > 0 required");
  }
  cdouble eval(double x, double t) const override {
    // [(cosh u - 1)/(cosh u + 2)]^{1/2} taken on the analytic branch that is
    // odd through the core (pi phase step): sqrt2 sinh(u/2)/sqrt(cosh u + 2)
    double u = std::sqrt(3.0) * r_ * (x - v_ * t);
    double amp = std::sqrt(2.0 * r_) * std::sinh(0.5 * u) / std::sqrt(std::cosh(u) + 2.0);
    double phase = phi_ + 0.5 * v_ * x - 0.25 * (v_ * v_ + 3.0 * r_ * r_) * t;
    return amp * std::exp(kI * phase);
  }
  EquationSpec equation() const override { return QuinticFreeEq{-1}; }
  std::string family() const override { return "quintic_source"; }

 private:
  double phi_, v_, r_;
};

class BlowupFamily final : public Solution {
 public:
  BlowupFamily(SolutionHandle base, const GroupInit& gi) : base_(std::move(base)), gi_(gi) {
    if (gi.beta <= 0) throw std::invalid_argument("blowup_family: beta(0) > 0 required");
    if (!std::holds_alternative<QuinticFreeEq>(base_->equation()))
      throw std::invalid_argument("blowup_family: base must solve the free quintic equation");
  }
  cdouble eval(double x, double t) const override {
    double den = 1.0 + 4.0 * gi_.alpha * t;
    if (den <= 0) throw std::domain_error("blowup_family: evaluated at/past the blow-up time");
    double amp = std::sqrt(gi_.beta / den);
    double phase = (gi_.alpha * x * x + gi_.delta * x - gi_.delta * gi_.delta * t) / den +
                   gi_.kappa;
    double xi = gi_.beta * (x - 2.0 * gi_.delta * t) / den + gi_.eps;
    double tau = gi_.beta * gi_.beta * t / den - gi_.gamma;
    return amp * std::exp(kI * phase) * base_->eval(xi, tau);
  }
  EquationSpec equation() const override { return base_->equation(); }
  std::string family() const override { return "blowup_family"; }
  bool square_integrable() const override { return base_->square_integrable(); }
  std::vector<double> singular_times(double t0, double t1) const override {
    if (gi_.alpha == 0.0) return {};
    double ts = -1.0 / (4.0 * gi_.alpha);
    if (ts >= t0 && ts <= t1) return {ts};
    return {};
  }

 private:
  SolutionHandle base_;
  GroupInit gi_;
};

class FreeToTrap final : public Solution {
 public:
  explicit FreeToTrap(SolutionHandle base) : base_(std::move(base)) {
    if (!std::holds_alternative<QuinticFreeEq>(base_->equation()))
      throw std::invalid_argument("gauge_free_to_trap: base must solve the free quintic equation");
    sign_ = std::get<QuinticFreeEq>(base_->equation()).sign;
  }
  cdouble eval(double x, double t) const override {
    double c = std::cos(2.0 * t);
    if (c <= 0) throw std::domain_error("gauge_free_to_trap: cos(2t) must be positive");
    double tn = std::tan(2.0 * t);
    return std::exp(-0.5 * kI * x * x * tn) / std::sqrt(c) * base_->eval(x / c, 0.5 * tn);
  }
  EquationSpec equation() const override { return QuinticTrapEq{sign_}; }
  std::string family() const override { return "trap_from_free"; }
  bool square_integrable() const override { return base_->square_integrable(); }
  std::vector<double> singular_times(double t0, double t1) const override {
    std::vector<double> out;
    for (long n = std::lround(std::floor(t0 / (kPi / 4))) - 1;; ++n) {
      double ts = (2 * n + 1) * kPi / 4.0;
      if (ts > t1) break;
      if (ts >= t0) out.push_back(ts);
    }
    return out;
  }

 private:
  SolutionHandle base_;
  int sign_ = +1;
};

class OscPulse final : public Solution {
 public:
  OscPulse(double phi, double v, double k) : phi_(phi), v_(v), k_(k) {
    if (!(k > 0)) throw std::invalid_argument("osc_pulse: k > 0 required");
  }
  cdouble eval(double x, double t) const override {
    double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
    if (c == 0) throw std::domain_error("osc_pulse: turning point");
    double arg = (2.0 * k_ / c) * (x - v_ * s);
    double amp = std::sqrt(2.0 * k_ / c / std::cosh(arg));
    double phase = phi_ + (2.0 * v_ * x + (k_ * k_ - v_ * v_ - x * x) * s) / (2.0 * c);
    return amp * std::exp(kI * phase);
  }
  EquationSpec equation() const override { return QuinticTrapEq{+1}; }
  std::string family() const override { return "osc_pulse"; }
  bool square_integrable() const override { return true; }
  std::vector<double> singular_times(double t0, double t1) const override {
    std::vector<double> out;
    for (long n = std::lround(std::floor(t0 / (kPi / 4))) - 1;; ++n) {
      double ts = (2 * n + 1) * kPi / 4.0;
      if (ts > t1) break;
      if (ts >= t0) out.push_back(ts);
    }
    return out;
  }

 private:
  double phi_, v_, k_;
};

class OscSource final : public Solution {
 public:
  OscSource(double phi, double v, double r) : phi_(phi), v_(v), r_(r) {
    if (!(r > 0)) throw std::invalid_argument("osc_source: r > 0 required");
  }
  cdouble eval(double x, double t) const override {
    double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
    if (c <= 0) throw std::domain_error("osc_source: needs cos(2t) > 0");
    double u = (2.0 * r_ / c) * (x - v_ * s);
    // [1 - 3/(cosh u + 2)]^{1/2} on the odd analytic branch through the core
    double bracket_sqrt = std::sqrt(2.0) * std::sinh(0.5 * u) / std::sqrt(std::cosh(u) + 2.0);
    double amp = std::sqrt(2.0 * r_ / (std::sqrt(3.0) * c)) * bracket_sqrt;
    double phase = phi_ + (2.0 * v_ * x - (v_ * v_ + r_ * r_ + x * x) * s) / (2.0 * c);
    return amp * std::exp(kI * phase);
  }
  EquationSpec equation() const override { return QuinticTrapEq{-1}; }
  std::string family() const override { return "osc_source"; }

 private:
  double phi_, v_, r_;
};

class OscPulseGeneral final : public Solution {
 public:
  OscPulseGeneral(double phi, double v, double k, double a0, double b0, double d0, double e0)
      : phi_(phi), v_(v), k_(k), a0_(a0), b0_(b0), d0_(d0), e0_(e0) {
    if (!(k > 0) || b0 == 0.0)
      throw std::invalid_argument("osc_pulse_general: k > 0 and beta(0) != 0 required");
  }
  cdouble eval(double x, double t) const override {
    double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
    double q = 2.0 * a0_ * s + c;
    if (q == 0) throw std::domain_error("osc_pulse_general: blow-up time");
    double arg = 2.0 * k_ * (b0_ * (x - (d0_ + v_ * b0_) * s) / q + e0_);
    double amp = std::sqrt(2.0 * k_ * b0_ / q / std::cosh(arg));
    double ph1 = ((2.0 * a0_ * c - s) * x * x + d0_ * (2.0 * x - d0_ * s)) / (2.0 * q);
    double ph2 = b0_ * (2.0 * v_ * (x - d0_ * s) + (k_ * k_ - v_ * v_) * b0_ * s) / (2.0 * q) +
                 v_ * e0_;
    return amp * std::exp(kI * (phi_ + ph1 + ph2));
  }
  EquationSpec equation() const override { return QuinticTrapEq{+1}; }
  std::string family() const override { return "osc_pulse_general"; }
  bool square_integrable() const override { return true; }
  std::vector<double> singular_times(double t0, double t1) const override {
    // q(t) = 2 alpha(0) sin 2t + cos 2t = 0  <=>  cot 2t = -2 alpha(0)
    std::vector<double> out;
    double base = 0.5 * std::atan2(-1.0, 2.0 * a0_);
    for (long n = -8; n <= 8; ++n) {
      double ts = base + n * kPi / 2.0;
      if (ts >= t0 && ts <= t1) out.push_back(ts);
    }
    return out;
  }

 private:
  double phi_, v_, k_, a0_, b0_, d0_, e0_;
};

class GroupOrbitTrap final : public Solution {
 public:
  GroupOrbitTrap(SolutionHandle base, const GroupInit& gi) : base_(std::move(base)), gi_(gi) {
    if (gi.beta == 0.0) throw std::invalid_argument("group_orbit_trap: beta(0) != 0 required");
    bool trap = std::holds_alternative<QuinticTrapEq>(base_->equation()) ||
                std::holds_alternative<DnlsTrapEq>(base_->equation());
    if (!trap)
      throw std::invalid_argument("group_orbit_trap: base must solve a trapped-family equation");
    double b2 = gi.beta * gi.beta;
    c1_ = cdouble(0.5 * (1.0 + b2), -gi.alpha);
    c2_ = cdouble(0.5 * (1.0 - b2), gi.alpha);
    c3_ = cdouble(gi.eps * gi.beta, gi.delta);
  }
  cdouble eval(double x, double t) const override {
    cdouble e2 = std::exp(2.0 * kI * t);
    cdouble z = c1_ * e2 + c2_ / e2;
    cdouble dz = 2.0 * kI * (c1_ * e2 - c2_ / e2);
    double z2 = std::norm(z);
    double absz = std::sqrt(z2);
    double b2 = gi_.beta * gi_.beta;
    double alpha = (std::conj(z) * dz).real() / (4.0 * z2);
    double beta = gi_.beta / absz;
    double gamma = 0.5 * std::arg(z);
    double delta = (c3_ * z).imag() / z2;
    double eps = (c3_ * z).real() / (gi_.beta * absz);
    double kappa = (c3_ * c3_ * z).real() * z.imag() / (2.0 * b2 * z2);
    double amp = std::sqrt(gi_.beta / absz);
    // the base evolves forward with +gamma: the kernel chain gives
    // chi_std(xi, -arg z / 2) = base(xi, +arg z / 2)
    return amp * std::exp(kI * (alpha * x * x + delta * x + kappa)) *
           base_->eval(beta * x + eps, gamma);
  }
  EquationSpec equation() const override { return base_->equation(); }
  std::string family() const override { return "group_orbit_trap"; }
  bool square_integrable() const override { return base_->square_integrable(); }

 private:
  SolutionHandle base_;
  GroupInit gi_;
  cdouble c1_, c2_, c3_;
};

}  // namespace

SolutionHandle quintic_pulse(double phi, double v, double k) {
  return std::make_shared<QuinticPulse>(phi, v, k);
}
SolutionHandle quintic_source(double phi, double v, double r) {
  return std::make_shared<QuinticSource>(phi, v, r);
}
SolutionHandle blowup_family(SolutionHandle base, const GroupInit& init) {
  return std::make_shared<BlowupFamily>(std::move(base), init);
}
SolutionHandle gauge_free_to_trap(SolutionHandle base) {
  return std::make_shared<FreeToTrap>(std::move(base));
}
SolutionHandle osc_pulse(double phi, double v, double k) {
  return std::make_shared<OscPulse>(phi, v, k);
}
SolutionHandle osc_source(double phi, double v, double r) {
  return std::make_shared<OscSource>(phi, v, r);
}
SolutionHandle osc_pulse_general(double phi, double v, double k, double alpha0, double beta0,
                                 double delta0, double eps0) {
  return std::make_shared<OscPulseGeneral>(phi, v, k, alpha0, beta0, delta0, eps0);
}
SolutionHandle group_orbit_trap(SolutionHandle base, const GroupInit& init) {
  return std::make_shared<GroupOrbitTrap>(std::move(base), init);
}

bool group_orbit_shape_preserving(const GroupInit& init) {
  return init.alpha == 0.0 && std::abs(std::abs(init.beta) - 1.0) < 1e-15;
}

std::complex<double> group_orbit_c1c2(const GroupInit& init) {
  double b2 = init.beta * init.beta;
  return {0.25 * (1.0 - b2 * b2) - init.alpha * init.alpha, -init.alpha};
}

// --- elliptic profile ----------------------------------------------------------

double EllipticProfile::eval(double zz) const {
  if (zz < z.front() || zz > z.back())
    throw std::out_of_range("elliptic profile evaluated outside its range");
  auto it = std::upper_bound(z.begin(), z.end(), zz);
  std::size_t i = (it == z.begin()) ? 0 : (it - z.begin() - 1);
  i = std::min(i, z.size() - 2);
  return hermite_eval(z[i], z[i + 1], G[i], G[i + 1], dG[i], dG[i + 1], zz);
}

std::shared_ptr<const EllipticProfile> integrate_elliptic(double C0, double g0, double h0,
                                                          double z_half_range, const double* G0,
                                                          const double* dG0) {
  auto prof = std::make_shared<EllipticProfile>();
  prof->C0 = C0;
  prof->g0 = g0;
  prof->h0 = h0;

  double Gi, dGi;
  if (G0) {
    Gi = *G0;
    dGi = dG0 ? *dG0 : 0.0;
  } else {
    // start from a turning point: C0 + g0 G^2 + (h0/2) G^4 = 0 with inward force
    if (h0 != 0.0) {
      double disc = g0 * g0 - 2.0 * h0 * C0;
      if (disc < 0) throw std::invalid_argument("elliptic profile: no real turning point");
      double u1 = (-g0 + std::sqrt(disc)) / h0;
      double u2 = (-g0 - std::sqrt(disc)) / h0;
      double u = -1;
      for (double cand : {u1, u2})
        if (cand > 0 && (u < 0 || cand < u)) u = cand;
      if (u <= 0) throw std::invalid_argument("elliptic profile: no positive turning point");
      Gi = std::sqrt(u);
    } else {
      if (!(g0 < 0) || !(C0 > 0))
        throw std::invalid_argument("elliptic profile: linear case needs g0 < 0, C0 > 0");
      Gi = std::sqrt(-C0 / g0);
    }
    dGi = 0.0;
  }

  const int n_half = std::max(64, static_cast<int>(z_half_range / 0.002));
  std::vector<double> grid(2 * n_half + 1);
  for (int i = 0; i <= 2 * n_half; ++i)
    grid[i] = -z_half_range + i * (z_half_range / n_half);

  prof->z = grid;
  prof->G.assign(grid.size(), 0.0);
  prof->dG.assign(grid.size(), 0.0);

  OdeRhs rhs = [g0, h0](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = g0 * y[0] + h0 * y[0] * y[0] * y[0];
  };
  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-13;
  auto unbounded = [](double, std::span<const double> y) { return std::abs(y[0]) > 1e6; };

  // forward from 0
  {
    std::vector<double> fwd(grid.begin() + n_half, grid.end());
    std::vector<double> y0 = {Gi, dGi};
    OdeHaltInfo hi = integrate_on_grid(rhs, fwd, y0, opt,
                                       [&](std::size_t i, double, std::span<const double> y) {
                                         prof->G[n_half + i] = y[0];
                                         prof->dG[n_half + i] = y[1];
                                       },
                                       unbounded);
    if (hi.halted)
      throw std::runtime_error("elliptic profile escaped at z = " + std::to_string(hi.t));
  }
  // backward from 0
  {
    std::vector<double> bwd(grid.begin(), grid.begin() + n_half + 1);
    std::reverse(bwd.begin(), bwd.end());
    std::vector<double> y0 = {Gi, dGi};
    OdeHaltInfo hi = integrate_on_grid(rhs, bwd, y0, opt,
                                       [&](std::size_t i, double, std::span<const double> y) {
                                         prof->G[n_half - i] = y[0];
                                         prof->dG[n_half - i] = y[1];
                                       },
                                       unbounded);
    if (hi.halted)
      throw std::runtime_error("elliptic profile escaped at z = " + std::to_string(hi.t));
  }

  double drift = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double G = prof->G[i], dG = prof->dG[i];
    double Q = dG * dG - C0 - g0 * G * G - 0.5 * h0 * G * G * G * G;
    drift = std::max(drift, std::abs(Q));
  }
  prof->first_integral_drift = drift;
  return prof;
}

namespace {

class EllipticPacket final : public Solution {
 public:
  EllipticPacket(std::shared_ptr<const TransformKernel> kernel,
                 std::shared_ptr<const Scenario> scen,
                 std::shared_ptr<const EllipticProfile> prof, const EllipticParams& p)
      : kernel_(std::move(kernel)), scen_(std::move(scen)), prof_(std::move(prof)), p_(p),
        dense_(*kernel_) {}
  cdouble eval(double x, double t) const override {
    double mu = dense_.mu(t);
    if (mu <= 0) throw std::domain_error("elliptic_packet: mu must stay positive");
    double al = dense_.alpha(t), be = dense_.beta(t), ga = dense_.gamma(t);
    double de = dense_.delta(t), ep = dense_.eps(t), ka = dense_.kappa(t);
    double phase = p_.phi + al * x * x + be * x * p_.y + ga * (p_.y * p_.y - p_.g0) + de * x +
                   ep * p_.y + ka;
    return std::exp(kI * phase) / std::sqrt(mu) * prof_->eval(be * x + 2.0 * ga * p_.y + ep);
  }
  EquationSpec equation() const override {
    GeneralVariableEq eq;
    eq.scen = scen_;
    auto kernel = kernel_;
    auto scen = scen_;
    double h0 = p_.h0;
    eq.h[2] = [kernel, scen, h0](double t) -> cdouble {
      KernelDense d(*kernel);
      return h0 * scen->a(t) * d.beta(t) * d.beta(t) * d.mu(t);
    };
    return eq;
  }
  std::string family() const override { return "elliptic_packet"; }
  bool square_integrable() const override {
    return p_.C0 == 0.0 && p_.g0 > 0.0 && p_.h0 < 0.0;  // homoclinic sech-type profile
  }

 private:
  std::shared_ptr<const TransformKernel> kernel_;
  std::shared_ptr<const Scenario> scen_;
  std::shared_ptr<const EllipticProfile> prof_;
  EllipticParams p_;
  KernelDense dense_;
};

}  // namespace

SolutionHandle elliptic_packet(std::shared_ptr<const TransformKernel> kernel,
                               std::shared_ptr<const Scenario> scen,
                               std::shared_ptr<const EllipticProfile> profile,
                               const EllipticParams& params) {
  return std::make_shared<EllipticPacket>(std::move(kernel), std::move(scen), std::move(profile),
                                          params);
}

// --- Airy gun -------------------------------------------------------------------

double AiryGunKinematics::x(double t) const {
  return g * t1 * t1 * t1 / (t1 - t) - 2.0 * g * t1 * t1 + C1 * (t1 - t);
}
double AiryGunKinematics::velocity(double t) const {
  double den = t1 - t;
  return g * t1 * t1 * t1 / (den * den) - C1;
}
double AiryGunKinematics::acceleration(double t) const {
  double den = t1 - t;
  return 2.0 * g * t1 * t1 * t1 / (den * den * den);
}
double AiryGunKinematics::newton_residual(double t) const {
  double den = t1 - t;
  return den * den * acceleration(t) - den * velocity(t) - x(t) - 2.0 * g * t1 * t1;
}
double AiryGunKinematics::orbit_residual(double t) const {
  double P = velocity(t) + C1;
  double Q = x(t) + 2.0 * g * t1 * t1;
  return Q * Q / C2 - (2.0 * C1 + P + C1 * C1 / P);
}

AiryGunKinematics airy_gun(double g, double t1, double x0) {
  if (!(t1 > 0)) throw std::invalid_argument("airy_gun: t1 > 0 required");
  AiryGunKinematics k;
  k.g = g;
  k.t1 = t1;
  k.x0 = x0;
  k.C1 = g * t1 + x0 / (std::cbrt(g) * t1);
  k.C2 = g * t1 * t1 * t1;
  return k;
}

// --- factory --------------------------------------------------------------------

namespace {
double get_param(const std::vector<std::pair<std::string, double>>& params,
                 const std::string& key, double fallback, bool required = false) {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  if (required) throw std::invalid_argument("missing parameter: " + key);
  return fallback;
}
}  // namespace

std::string catalog_listing_json() {
  nlohmann::json j = nlohmann::json::array();
  auto add = [&](const char* family, const char* params, const char* equation,
                 const char* validity) {
    j.push_back({{"family", family}, {"params", params}, {"equation", equation},
                 {"validity", validity}});
  };
  add("pii-packet", "g,v,k0[,zmin]", "cubic+ / cubic-", "z within integrated profile");
  add("airy-berry", "g,v", "linear-free", "entire plane");
  add("airy-expansion", "g,t1", "linear-free", "t < t1 (t > 0 when t1 = 0)");
  add("const-velocity", "k,v,k0[,zmin]", "linear-potential:k", "z within integrated profile");
  add("quintic-pulse", "phi,v,k", "quintic+", "entire plane");
  add("quintic-source", "phi,v,r", "quintic-", "entire plane");
  add("blowup-pulse", "k,alpha0,beta0,gamma0,delta0,eps0,kappa0", "quintic+",
      "t < t0 = -1/(4 alpha0)");
  add("trap-from-free-pulse", "phi,v,k", "quintic-trap+", "|t| < pi/4 mod pi");
  add("osc-pulse", "phi,v,k", "quintic-trap+", "cos 2t != 0");
  add("osc-source", "phi,v,r", "quintic-trap-", "cos 2t > 0");
  add("osc-pulse-general", "phi,v,k,alpha0,beta0,delta0,eps0", "quintic-trap+",
      "cot 2t != -2 alpha0");
  add("group-orbit-osc-pulse", "phi,v,k,alpha0,beta0,delta0,eps0", "quintic-trap+",
      "entire plane (beta0 != 0)");
  return j.dump(2);
}

SolutionHandle make_solution(const std::string& family,
                             const std::vector<std::pair<std::string, double>>& params) {
  auto P = [&](const std::string& key, double fb, bool req = false) {
    return get_param(params, key, fb, req);
  };
  if (family == "pii-packet") {
    double k0 = P("k0", 0.5);
    double zmin = P("zmin", -45.0);
    PiiSign sign = P("focusing", 0.0) > 0.5 ? PiiSign::focusing : PiiSign::defocusing;
    auto prof = std::make_shared<PiiProfile>(integrate_pii(sign, seed_from_airy(k0), zmin));
    return pii_packet(P("g", 1.0), P("v", 0.0), prof);
  }
  if (family == "airy-berry") return airy_berry(P("g", 1.0), P("v", 0.0));
  if (family == "airy-expansion") return airy_expansion(P("g", 1.0), P("t1", 1.0, true));
  if (family == "const-velocity") {
    double k0 = P("k0", 0.5);
    auto prof = std::make_shared<PiiProfile>(
        integrate_pii(PiiSign::defocusing, seed_from_airy(k0), P("zmin", -45.0)));
    return const_velocity_packet(P("k", 0.5), P("v", 0.0), prof);
  }
  if (family == "quintic-pulse") return quintic_pulse(P("phi", 0.0), P("v", 0.0), P("k", 1.0));
  if (family == "quintic-source") return quintic_source(P("phi", 0.0), P("v", 0.0), P("r", 1.0));
  if (family == "blowup-pulse") {
    GroupInit gi{P("alpha0", -0.25), P("beta0", 1.0), P("gamma0", 0.0),
                 P("delta0", 0.0),  P("eps0", 0.0),  P("kappa0", 0.0)};
    return blowup_family(quintic_pulse(0.0, 0.0, P("k", 1.0)), gi);
  }
  if (family == "trap-from-free-pulse")
    return gauge_free_to_trap(quintic_pulse(P("phi", 0.0), P("v", 0.0), P("k", 1.0)));
  if (family == "osc-pulse") return osc_pulse(P("phi", 0.0), P("v", 0.0), P("k", 1.0));
  if (family == "osc-source") return osc_source(P("phi", 0.0), P("v", 0.0), P("r", 1.0));
  if (family == "osc-pulse-general")
    return osc_pulse_general(P("phi", 0.0), P("v", 0.0), P("k", 1.0), P("alpha0", 0.0),
                             P("beta0", 1.0), P("delta0", 0.0), P("eps0", 0.0));
  if (family == "group-orbit-osc-pulse") {
    GroupInit gi{P("alpha0", 0.1), P("beta0", 1.0), 0.0, P("delta0", 0.0), P("eps0", 0.0), 0.0};
    return group_orbit_trap(osc_pulse(P("phi", 0.0), P("v", 0.0), P("k", 1.0)), gi);
  }
  throw std::invalid_argument("unknown solution family: " + family);
}

}  // namespace nlsframes
