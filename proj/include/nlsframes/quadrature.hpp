#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace nlsframes {

// Adaptive Gauss-Kronrod (G7,K15) on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                 int max_depth = 60);

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, double tol = 1e-12);

// Cumulative trapezoid of samples y on grid x; out[0] = 0.
std::vector<double> cumtrapz(const std::vector<double>& x, const std::vector<double>& y);

// Trapezoid on a uniform grid (spacing h).
double trapz_uniform(const std::vector<double>& y, double h);

}  // namespace nlsframes
