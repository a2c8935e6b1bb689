#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "nlsframes/scenario.hpp"

using namespace nlsframes;

TEST_CASE("fiber scenario coefficients are the stated constants") {
  const Scenario& s = builtin_scenarios().at("fiber");
  for (double t : {0.0, 0.7, 1.9}) {
    CoeffValues v = s.coeffs(t);
    CHECK(v.a == doctest::Approx(0.5));
    CHECK(v.b == 0.0);
    CHECK(v.c == 0.0);
    CHECK(v.d == doctest::Approx(0.2));
    CHECK(v.f == 0.0);
    CHECK(v.g == doctest::Approx(1.0));
  }
}

TEST_CASE("free particle coefficients") {
  const Scenario& s = builtin_scenarios().at("free");
  CoeffValues v = s.coeffs(1.3);
  CHECK(v.a == 1.0);
  CHECK(v.b == 0.0);
  CHECK(v.g == 0.0);
}

TEST_CASE("tabulated coefficient reproduces its analytic source") {
  const Scenario& s = builtin_scenarios().at("tabulated-dispersion");
  CHECK(std::abs(s.a(0.5) - (std::sin(0.5) + 2.0)) <= 1e-8);
  CHECK(std::abs(s.a(0.37) - (std::sin(0.37) + 2.0)) <= 1e-8);
  // derivative from 4th-order differenced samples
  CHECK(std::abs(s.a.derivative(0.5) - std::cos(0.5)) <= 1e-7);
}

TEST_CASE("domain and a(t)=0 checks") {
  const Scenario& s = builtin_scenarios().at("fiber");
  CHECK_THROWS_AS(s.coeffs(5.0), std::out_of_range);
  Scenario bad = s;
  bad.a = TimeFunction::expression("t");  // vanishes at t=0
  CHECK_THROWS_AS(bad.coeffs(0.0), std::domain_error);
}

TEST_CASE("characteristic coefficients") {
  SUBCASE("a=1,b=1 rest zero") {
    const Scenario& s = builtin_scenarios().at("harmonic");
    CharCoeffs cc = s.char_coeffs(0.4);
    CHECK(cc.tau == doctest::Approx(0.0));
    CHECK(cc.sigma == doctest::Approx(1.0));
  }
  SUBCASE("a, d constant, b=c=0 gives tau=4d, sigma=d^2") {
    const Scenario& s = builtin_scenarios().at("fiber");
    CharCoeffs cc = s.char_coeffs(1.0);
    CHECK(cc.tau == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(cc.sigma == doctest::Approx(0.04).epsilon(1e-14));
  }
  SUBCASE("a=e^{2t}, d=1, b=c=0 gives tau=6, sigma=2") {
    const Scenario& s = builtin_scenarios().at("growing-dispersion");
    CharCoeffs cc = s.char_coeffs(0.3);
    CHECK(cc.tau == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(cc.sigma == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("constant coefficients give t-independent values") {
    const Scenario& s = builtin_scenarios().at("fiber");
    CharCoeffs c1 = s.char_coeffs(0.1);
    CharCoeffs c2 = s.char_coeffs(1.7);
    CHECK(c1.tau == c2.tau);
    CHECK(c1.sigma == c2.sigma);
  }
}

TEST_CASE("JSON round trip") {
  const Scenario& s = builtin_scenarios().at("modulated-trap");
  Scenario back = Scenario::from_json_text(s.to_json_text());
  for (double t : {0.0, 1.0, 2.5}) {
    CHECK(back.b(t) == doctest::Approx(s.b(t)).epsilon(1e-15));
    CHECK(back.a(t) == s.a(t));
  }
  CHECK(back.name == s.name);
  CHECK(back.t1 == s.t1);
}

TEST_CASE("scenario file with samples") {
  const char* text = R"({
    "name": "from-file",
    "t_domain": [0.0, 1.0],
    "a": {"samples": [[0.0,2.0],[0.25,2.2],[0.5,2.5],[0.75,2.2],[1.0,2.0]], "order": 3},
    "g": {"expr": "0.1*t"}
  })";
  Scenario s = Scenario::from_json_text(text);
  CHECK(s.a(0.5) == doctest::Approx(2.5));
  CHECK(s.g(1.0) == doctest::Approx(0.1));
  CHECK(s.b(0.3) == 0.0);
}
