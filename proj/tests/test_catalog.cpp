#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlsframes/catalog.hpp"
#include "nlsframes/specfun.hpp"
#include "nlsframes/quadrature.hpp"
#include "nlsframes/util.hpp"
#include "nlsframes/verify.hpp"

using namespace nlsframes;
using cdouble = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

WaveField sample_handle(const SolutionHandle& h, const Grid1D& g, double t0, double t1, int nt) {
  return sample_field(g, linspace(t0, t1, nt),
                      [&](double x, double t) { return h->eval(x, t); }, h->equation());
}

double l2_norm(const SolutionHandle& h, const Grid1D& g, double t) {
  double acc = 0;
  for (int i = 0; i < g.n; ++i) acc += std::norm(h->eval(g.x(i), t));
  return acc * g.dx();
}

}  // namespace

TEST_CASE("quintic pulse: residual, norm, Galilei covariance") {
  SolutionHandle h = quintic_pulse(0.3, 0.4, 1.0);
  Grid1D g{-40.0, 40.0, 1024};
  WaveField f = sample_handle(h, g, 0.0, 0.5, 100);
  ResidualReport r = residual(h->equation(), f);
  CHECK(r.rel_sup <= 1e-6);
  CHECK(l2_norm(h, g, 0.0) == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(l2_norm(h, g, 0.37) == doctest::Approx(kPi).epsilon(1e-10));
  // wrong sign is a negative control
  ResidualReport rw = residual(QuinticFreeEq{-1}, f);
  CHECK(rw.rel_sup >= 1e-2);
  // |psi_v(x,t)| = |psi_0(x - vt, t)|
  SolutionHandle h0 = quintic_pulse(0.3, 0.0, 1.0);
  for (double t : {0.1, 0.4})
    for (double x : {-2.0, 0.7})
      CHECK(std::abs(std::abs(h->eval(x, t)) - std::abs(h0->eval(x - 0.4 * t, t))) <= 1e-12);
}

TEST_CASE("quintic source: plateau limit and residual") {
  SolutionHandle h = quintic_source(0.1, 0.0, 0.8);
  CHECK(std::norm(h->eval(40.0, 0.0)) == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(std::norm(h->eval(-40.0, 0.2)) == doctest::Approx(0.8).epsilon(1e-10));
  Grid1D g{-18.0, 18.0, 2048};
  WaveField f = sample_handle(h, g, 0.0, 0.4, 100);
  ResidualReport r = residual(h->equation(), f, {XDerivMode::fd8});
  CHECK(r.rel_sup <= 1e-6);
  // the core is an analytic zero crossing (pi phase step), not a cusp
  double a_minus = h->eval(-0.01, 0.0).real() * std::cos(0.1);
  double a_plus = h->eval(0.01, 0.0).real() * std::cos(0.1);
  CHECK(a_minus * a_plus < 0.0);
}

TEST_CASE("pii packets: defocusing residual and the linear Airy limit") {
  auto prof = std::make_shared<PiiProfile>(
      integrate_pii(PiiSign::defocusing, seed_from_airy(0.5), -40.0));
  SolutionHandle h = pii_packet(1.0, 0.3, prof);
  // z-window: g^{1/3}(x - vt - gt^2) must stay inside the profile
  Grid1D g{-21.0, 5.0, 1024};
  WaveField f = sample_handle(h, g, 0.0, 0.2, 100);
  ResidualReport r = residual(h->equation(), f);  // automatic -> fd8 (oscillatory tail)
  CHECK(r.x_mode_used == "fd8");
  CHECK(r.rel_sup <= 1e-6);
  ResidualReport rw = residual(CubicEq{-1}, f);
  CHECK(rw.rel_sup >= 1e-2);

  SolutionHandle berry = airy_berry(1.0, 0.0);
  WaveField fb = sample_handle(berry, g, 0.0, 0.2, 100);
  ResidualReport rb = residual(berry->equation(), fb);
  CHECK(rb.rel_sup <= 1e-6);
}

TEST_CASE("const-velocity packet on the linear-potential equation") {
  auto prof = std::make_shared<PiiProfile>(
      integrate_pii(PiiSign::defocusing, seed_from_airy(0.5), -40.0));
  SolutionHandle h = const_velocity_packet(0.5, 0.6, prof);
  Grid1D g{-21.0, 5.0, 1024};
  WaveField f = sample_handle(h, g, 0.0, 0.2, 100);
  ResidualReport r = residual(h->equation(), f);
  CHECK(r.rel_sup <= 1e-6);
  // modulus translates rigidly
  for (double x : {-5.0, 0.0, 2.0})
    CHECK(std::abs(std::abs(h->eval(x, 0.3)) - std::abs(h->eval(x - 0.6 * 0.2, 0.1))) <= 1e-12);
}

TEST_CASE("airy expansion packet") {
  SolutionHandle h = airy_expansion(1.0, 1.0);
  // t = 0 reduction
  for (double x : {-3.0, 0.0, 2.0}) {
    cdouble want = std::exp(cdouble(0.0, -x * x / 4.0)) * airy_ai(x);
    CHECK(std::abs(h->eval(x, 0.0) - want) <= 1e-12);
  }
  // the quadratic phase rate x^2/(4(t1-t)^2) bounds the usable window for the
  // 4th-order time stencil
  Grid1D g{-5.0, 4.0, 2048};
  WaveField f = sample_handle(h, g, 0.0, 0.12, 100);
  ResidualReport r = residual(h->equation(), f);
  CHECK(r.rel_sup <= 1e-6);
  // amplitude near t1 stays bounded at fixed x and loses x-dependence
  double a1 = std::abs(h->eval(-1.0, 0.999));
  double a2 = std::abs(h->eval(1.0, 0.999));
  CHECK(std::isfinite(a1));
  CHECK(a1 <= 2.0);
  CHECK(std::abs(a1 - a2) <= 0.2);
  CHECK_THROWS(h->eval(0.0, 1.0));
  // degenerate t1 = 0 form solves the same equation for t > 0
  SolutionHandle hd = airy_expansion(1.0, 0.0);
  WaveField fd = sample_handle(hd, Grid1D{-3.5, 3.5, 2048}, 0.7, 1.0, 100);
  ResidualReport rd = residual(hd->equation(), fd);
  CHECK(rd.rel_sup <= 1e-6);
}

TEST_CASE("airy gun kinematics") {
  AiryGunKinematics kin = airy_gun(1.3, 0.9, -2.294);  // x0 at an Airy ridge
  CHECK(kin.C2 == doctest::Approx(1.3 * 0.9 * 0.9 * 0.9).epsilon(1e-15));
  for (double t : {-3.0, -1.0, 0.0, 0.5, 0.85}) {
    CHECK(std::abs(kin.newton_residual(t)) <= 1e-10);
    CHECK(std::abs(kin.orbit_residual(t)) <= 1e-10);
  }
  // boundary data: velocity slope at -infinity and the pole residue at t1
  CHECK(kin.x(-1e8) / (0.9 + 1e8) == doctest::Approx(kin.C1).epsilon(1e-6));
  CHECK((0.9 - 0.89999999) * kin.x(0.89999999) == doctest::Approx(kin.C2).epsilon(1e-6));
  // C1 = 0 orbit degenerates to a parabola: P = Q^2/(2 C2)
  double x0_parab = -1.3 * std::cbrt(1.3) * 0.9 * 0.9;  // makes C1 vanish
  AiryGunKinematics kp = airy_gun(1.3, 0.9, x0_parab);
  CHECK(kp.C1 == doctest::Approx(0.0).epsilon(1e-14));
  for (double t : {-2.0, 0.0, 0.8}) {
    double P = kp.velocity(t) + kp.C1;
    double Q = kp.x(t) + 2 * kp.g * kp.t1 * kp.t1;
    CHECK(P == doctest::Approx(Q * Q / kp.C2).epsilon(1e-12));
  }
  // two profile points contract linearly toward t1
  AiryGunKinematics ka = airy_gun(1.3, 0.9, -1.0);
  AiryGunKinematics kb = airy_gun(1.3, 0.9, 1.0);
  for (double t : {0.0, 0.5, 0.89}) {
    double sep = ka.x(t) - kb.x(t);
    double want = (-1.0 - 1.0) * (0.9 - t) / (std::cbrt(1.3) * 0.9);
    CHECK(sep == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("blow-up family") {
  GroupInit gi;
  gi.alpha = -0.25;
  gi.beta = 1.0;
  SolutionHandle h = blowup_family(quintic_pulse(0.0, 0.0, 1.0), gi);
  auto sing = h->singular_times(0.0, 2.0);
  REQUIRE(sing.size() == 1);
  CHECK(sing[0] == doctest::Approx(1.0));
  // residual away from the blow-up
  Grid1D g{-35.0, 35.0, 2048};
  WaveField f = sample_handle(h, g, 0.0, 0.25, 100);
  ResidualReport r = residual(h->equation(), f);
  CHECK(r.rel_sup <= 1e-6);
  // norm conserved (= pi) while approaching the blow-up
  for (double t : {0.0, 0.5, 0.9}) {
    Grid1D gt{-60.0, 60.0, 8192};
    CHECK(l2_norm(h, gt, t) == doctest::Approx(kPi).epsilon(1e-8));
  }
  // alpha(0)=0: no singular time, plain scaled copy
  GroupInit g0;
  SolutionHandle h0 = blowup_family(quintic_pulse(0.0, 0.0, 1.0), g0);
  CHECK(h0->singular_times(0.0, 10.0).empty());
  // amplitude grows past 1e3 close to t0
  double amp = std::abs(h->eval(0.0, 1.0 - 1e-7));
  CHECK(amp >= 1e3);
}

TEST_CASE("free-to-trap gauge equals the oscillating pulse with doubled parameters") {
  SolutionHandle trap = gauge_free_to_trap(quintic_pulse(0.2, 0.8, 2.4));
  SolutionHandle osc = osc_pulse(0.2, 0.4, 1.2);  // Pulse(phi, 2v, 2k) identification
  for (double t : {-0.5, 0.0, 0.3, 0.7}) {
    for (double x : {-2.0, 0.0, 1.3}) {
      CHECK(std::abs(trap->eval(x, t) - osc->eval(x, t)) <= 1e-12);
    }
  }
  Grid1D g{-20.0, 20.0, 1024};
  WaveField f = sample_handle(trap, g, -0.35, 0.35, 150);
  ResidualReport r = residual(trap->equation(), f);
  CHECK(r.rel_sup <= 1e-6);
}

TEST_CASE("oscillating source") {
  SolutionHandle h = osc_source(0.0, 0.2, 0.7);
  // plateau limit 2r/(sqrt(3) cos 2t)
  double t = 0.25;
  CHECK(std::norm(h->eval(35.0, t)) ==
        doctest::Approx(2 * 0.7 / (std::sqrt(3.0) * std::cos(2 * t))).epsilon(1e-8));
  Grid1D g{-8.0, 8.0, 2048};
  WaveField f = sample_handle(h, g, -0.05, 0.05, 120);
  ResidualReport r = residual(h->equation(), f, {XDerivMode::fd8});
  CHECK(r.rel_sup <= 1e-6);
  // matches the gauge image of the free source with (2v, 2r/sqrt(3))
  SolutionHandle img = gauge_free_to_trap(quintic_source(0.0, 0.4, 2 * 0.7 / std::sqrt(3.0)));
  for (double t : {0.0, 0.2})
    for (double x : {-1.0, 0.5, 2.0})
      CHECK(std::abs(std::abs(h->eval(x, t)) - std::abs(img->eval(x, t))) <= 1e-12);
}

TEST_CASE("general oscillating pulse") {
  SolutionHandle h = osc_pulse_general(0.1, 0.0, 1.0, 0.3, 1.1, 0.4, -0.2);
  // blow-up times at cot 2t = -2 alpha(0)
  auto sing = h->singular_times(0.0, kPi);
  REQUIRE_FALSE(sing.empty());
  for (double ts : sing)
    CHECK(std::abs(std::cos(2 * ts) / std::sin(2 * ts) + 2 * 0.3) <= 1e-12);
  // reduces to osc_pulse for the identity group element
  SolutionHandle base = osc_pulse(0.1, 0.0, 1.0);
  SolutionHandle red = osc_pulse_general(0.1, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0);
  for (double t : {-0.4, 0.0, 0.5})
    for (double x : {-1.0, 0.7})
      CHECK(std::abs(red->eval(x, t) - base->eval(x, t)) <= 1e-13);
  Grid1D g{-18.0, 18.0, 1024};
  WaveField f = sample_handle(h, g, -0.1, 0.2, 120);
  ResidualReport r = residual(h->equation(), f);
  CHECK(r.rel_sup <= 1e-6);
}

TEST_CASE("harmonic group orbit") {
  CHECK(group_orbit_shape_preserving(GroupInit{0.0, 1.0, 0, 0, 0, 0}));
  CHECK_FALSE(group_orbit_shape_preserving(GroupInit{0.1, 1.0, 0, 0, 0, 0}));
  GroupInit gi{0.2, 1.1, 0.0, 0.3, -0.1, 0.0};
  cdouble c1c2 = group_orbit_c1c2(gi);
  double b2 = 1.1 * 1.1;
  CHECK(c1c2.real() == doctest::Approx((1 - b2 * b2) / 4 - 0.04).epsilon(1e-14));
  CHECK(c1c2.imag() == doctest::Approx(-0.2).epsilon(1e-14));

  // shape preservation: |z| = 1 for alpha=0, beta=1 -> modulus transport
  GroupInit shape{0.0, 1.0, 0.0, 0.2, 0.4, 0.0};
  SolutionHandle base = osc_pulse(0.0, 0.0, 1.0);
  SolutionHandle orbit = group_orbit_trap(base, shape);
  Grid1D g{-22.0, 22.0, 1024};
  WaveField f = sample_handle(orbit, g, -0.12, 0.12, 120);
  ResidualReport r = residual(orbit->equation(), f);
  CHECK(r.rel_sup <= 1e-6);

  // generic orbit still solves the trapped equation
  SolutionHandle orbit2 = group_orbit_trap(base, gi);
  WaveField f2 = sample_handle(orbit2, g, -0.12, 0.12, 120);
  ResidualReport r2 = residual(orbit2->equation(), f2);
  CHECK(r2.rel_sup <= 1e-6);
}

TEST_CASE("elliptic profiles and packets") {
  SUBCASE("linear case: exact harmonic oscillation") {
    auto prof = integrate_elliptic(0.5, -1.0, 0.0, 20.0);
    CHECK(prof->first_integral_drift <= 1e-9);
    // G = sqrt(0.5) cos(z)
    for (double z : {-15.0, -3.0, 0.0, 7.0})
      CHECK(std::abs(prof->eval(z) - std::sqrt(0.5) * std::cos(z)) <= 1e-8);
  }
  SUBCASE("sech case: C0=0, g0>0, h0<0") {
    auto prof = integrate_elliptic(0.0, 1.0, -0.5, 20.0);
    CHECK(prof->first_integral_drift <= 1e-9);
    // G = 2 sech z for g0=1, h0=-1/2
    for (double z : {-6.0, -1.0, 0.0, 2.5})
      CHECK(std::abs(prof->eval(z) - 2.0 / std::cosh(z)) <= 1e-8);
  }
  SUBCASE("generic bounded case over many periods") {
    auto prof = integrate_elliptic(0.1, 1.0, -0.5, 60.0);
    CHECK(prof->first_integral_drift <= 1e-9);
  }
  SUBCASE("stationary breather on the free cubic equation") {
    // identity kernel on the free scenario; y = C0 = 0, g0 > 0, h0 = -2
    const Scenario& s = builtin_scenarios().at("free");
    auto fs = std::make_shared<FundamentalSolution>(
        build_fundamental(s, linspace(0.0, 1.0, 501)));
    fs->pair.scen = &fs->scen;
    auto kernel = std::make_shared<TransformKernel>(riccati_superpose(*fs, KernelInit{}));
    auto scen = std::make_shared<Scenario>(fs->scen);
    auto prof = integrate_elliptic(0.0, 1.0, -2.0, 25.0);
    EllipticParams p;
    p.g0 = 1.0;
    p.h0 = -2.0;
    SolutionHandle h = elliptic_packet(kernel, scen, prof, p);
    // h0 = -2 cubic: closed form is e^{i g0 t} sqrt(g0) sech(sqrt(g0) x) after the flip
    for (double t : {0.1, 0.5})
      for (double x : {-1.0, 0.4}) {
        cdouble want = std::exp(cdouble(0.0, 1.0 * t)) / std::cosh(x);
        CHECK(std::abs(h->eval(x, t) - want) <= 1e-8);
      }
    Grid1D g{-20.0, 20.0, 1024};
    WaveField f = sample_handle(h, g, 0.1, 0.6, 100);
    ResidualReport r = residual(f.eq, f);
    CHECK(r.rel_sup <= 1e-6);
  }
}

TEST_CASE("L2 conservation across square-integrable families") {
  std::vector<SolutionHandle> handles = {
      quintic_pulse(0.0, 0.5, 1.2),
      osc_pulse(0.1, 0.3, 1.0),
      osc_pulse_general(0.0, 0.0, 1.0, 0.2, 1.0, 0.1, 0.0),
      group_orbit_trap(osc_pulse(0.0, 0.0, 1.0), GroupInit{0.15, 1.05, 0, 0.1, 0, 0}),
  };
  Grid1D g{-50.0, 50.0, 4096};
  for (const auto& h : handles) {
    REQUIRE(h->square_integrable());
    double n0 = l2_norm(h, g, 0.02);
    for (double t : {0.12, 0.31}) {
      INFO(h->family());
      CHECK(std::abs(l2_norm(h, g, t) - n0) / n0 <= 1e-8);
    }
  }
}

TEST_CASE("catalog descriptors") {
  std::string listing = catalog_listing_json();
  CHECK(listing.find("osc-pulse") != std::string::npos);
  SolutionHandle h = make_solution("quintic-pulse", {{"k", 1.5}, {"v", 0.2}});
  CHECK(h->family() == "quintic_pulse");
  CHECK(h->descriptor_json().find("quintic+") != std::string::npos);
  CHECK_THROWS(make_solution("nonsense", {}));
}
