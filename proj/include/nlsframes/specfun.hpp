#pragma once

#include <complex>
#include <vector>

namespace nlsframes {

// Airy function of the first kind and its derivative.
double airy_ai(double x);
double airy_ai_prime(double x);

// Gamma function for complex argument (Lanczos with reflection).
std::complex<double> gamma_complex(std::complex<double> w);
double arg_gamma(std::complex<double> w);  // arg of Gamma(w)

struct ConicalArgs {
  double omega;
  double theta;  // hypergeometric argument is -sinh(theta)^2
};

// 2F1(1/2+i w, 1/2-i w; 1; -sinh(theta)^2), real for real inputs.
double conical_2f1(const ConicalArgs& args);
inline double conical_2f1(double omega, double theta) { return conical_2f1({omega, theta}); }

// Independent evaluations used as oracles:
// Fourier-integral form, valid for |sinh(theta)| < 1.
double conical_2f1_fourier(double omega, double theta);
// Mehler-Dirichlet integral of the conical Legendre function P_{-1/2+i w}(cosh(2 theta)).
double conical_2f1_mehler(double omega, double theta);

struct AppendixVector {
  const char* label;
  double quadrature;
  double analytic;
};

// Quadrature evaluations of the elementary sech-type integrals together with
// their analytic values.
std::vector<AppendixVector> appendix_testvectors();

}  // namespace nlsframes
