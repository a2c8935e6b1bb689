#pragma once

#include <complex>
#include <vector>

#include "nlsframes/equation.hpp"
#include "nlsframes/field.hpp"

namespace nlsframes {

// Expectation values in the state psi: mean(X) = int X |psi|^2 dx / norm;
// p = -i d/dx (spectral); energy per equation kind (quintic forms pinned to
// E = mean(p^2) [+ mean(x^2)] - (1/4) int |psi|^6 / norm).
struct MomentReport {
  double norm = 0;           // int |psi|^2 dx
  double x_mean = 0, p_mean = 0;
  double x_var = 0, p_var = 0;
  double heisenberg = 0;     // x_var * p_var
  double energy = 0;
  double edge_magnitude = 0; // max |psi| at the two grid edges
};

MomentReport moments(const std::vector<std::complex<double>>& psi, const Grid1D& g,
                     const EquationSpec& eq);

struct SpectrumResult {
  std::vector<double> p;
  std::vector<std::complex<double>> B;   // unitary convention, 1/sqrt(2 pi)
  double parseval_mismatch = 0;          // |int|B|^2 - int|psi|^2|
  double tail_energy_fraction = 0;       // aliasing indicator
};

SpectrumResult spectrum(const std::vector<std::complex<double>>& psi, const Grid1D& g);

struct WignerGrid {
  std::vector<double> x, p;
  std::vector<double> W;  // row-major, W[ix * np + ip]
  double imag_residual_sup = 0;
  double marginal_x_mismatch_sup = 0;  // |int W dp - |psi(x)|^2|
  double mass_mismatch = 0;            // |int int W - norm|
  double at(std::size_t ix, std::size_t ip) const { return W[ix * p.size() + ip]; }
};

// W(x,p) = (1/2pi) int psi*(x+y/2) psi(x-y/2) e^{ipy} dy by trapezoid with
// y-steps of 2 dx (so x +- y/2 lands on grid nodes).
WignerGrid wigner_numeric(const std::vector<std::complex<double>>& psi, const Grid1D& g,
                          const std::vector<double>& x_eval, const std::vector<double>& p_eval);

// Closed Wigner form of the oscillating-pulse family:
// W = sech(pi w) 2F1(1/2+iw, 1/2-iw; 1; -sinh^2 theta).
struct WignerFamily {
  enum Kind { osc_pulse, osc_pulse_general, quintic_pulse } kind = osc_pulse;
  double v = 0, k = 1;
  double alpha0 = 0, beta0 = 1, delta0 = 0, eps0 = 0;  // general family only
};

double wigner_closed(const WignerFamily& fam, double x, double p, double t);
// The (w, theta) parameter maps of the closed form.
void wigner_parameters(const WignerFamily& fam, double x, double p, double t, double& w,
                       double& theta);

void write_wigner_csv(const WignerGrid& w, const std::string& path);

}  // namespace nlsframes
