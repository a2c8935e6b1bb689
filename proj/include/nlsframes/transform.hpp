#pragma once

#include <complex>
#include <functional>
#include <memory>

#include "nlsframes/catalog.hpp"
#include "nlsframes/equation.hpp"
#include "nlsframes/field.hpp"
#include "nlsframes/kernel.hpp"

namespace nlsframes {

// A solution of the autonomous standard form
// -i chi_tau + chi_xixi - c0 xi^2 chi = d0 chi + ... in its own (xi, tau) frame.
struct StandardSolution {
  std::function<std::complex<double>(double, double)> chi;
  AutonomousStandardEq eq;
};

// Adapts a catalog solution (physical +i d/dt convention) to the standard
// frame by time reflection chi(xi, tau) = psi(xi, -tau).
StandardSolution standard_from_catalog(const SolutionHandle& handle);

// Rescales a cubic standard solution to a different coupling d2'; the
// amplitude factor sqrt(d2/d2') preserves the equation family.
StandardSolution rescale_cubic(const StandardSolution& s, std::complex<double> d2_target);

// psi(x,t) = e^{i(alpha x^2 + delta x + kappa)} / sqrt(mu) * chi(beta x + eps, gamma(t)).
// The sqrt branch is continuous from sqrt(mu(t0)) > 0; caustics are forbidden
// inside the requested window.
WaveField push_forward(const Scenario& scen, const TransformKernel& k, const StandardSolution& chi,
                       const Grid1D& x_grid, const std::vector<double>& t_slices);

// Pointwise gauge application without sampling.
std::complex<double> push_forward_point(const KernelDense& kd, const StandardSolution& chi,
                                        double x, double t);

// Inverse substitution: chi(xi, tau) = sqrt(mu) e^{-iS} psi((xi - eps)/beta, t(tau)),
// with t(tau) from the strictly monotone gamma. psi may be given as samples
// (spline-resampled) or as an evaluator.
WaveField pull_back(const TransformKernel& k, const WaveField& psi,
                    const std::vector<double>& xi_grid_hint, int n_xi,
                    const std::vector<double>& tau_slices);
std::complex<double> pull_back_point(const KernelDense& kd,
                                     const std::function<std::complex<double>(double, double)>& psi,
                                     double xi, double tau);

// Variable-coefficient images h0..h5 of the autonomous constants d0..d5 under
// a (real) kernel, as functions of t.
struct NonlinearityMap {
  std::shared_ptr<const Scenario> scen;
  AutonomousStandardEq d;
  std::shared_ptr<const TransformKernel> kernel;
  std::complex<double> h(int index, double t) const;  // index 0..5
  GeneralVariableEq variable_equation() const;
};

NonlinearityMap nonlinearity_map(std::shared_ptr<const Scenario> scen,
                                 std::shared_ptr<const TransformKernel> kernel,
                                 const AutonomousStandardEq& d);

// h(t) = h0 a beta^2 mu^{p/2} (evaluated in both printed forms; they must
// agree through beta mu = beta(0) mu(0) lambda).
struct IntegrabilityH {
  std::vector<double> t;
  std::vector<double> h_first_form, h_second_form;
  double forms_disagreement_sup = 0.0;
};
IntegrabilityH integrability_h(const Scenario& scen, const TransformKernel& k,
                               const FundamentalPair& pair, double h0, double p);

// d/dt [ h / (a beta^2 mu^{p/2}) ] by centered differences on the kernel grid.
struct AdiabaticResidual {
  std::vector<double> t;
  std::vector<double> value;
  double sup = 0.0;
};
AdiabaticResidual adiabatic_residual(const Scenario& scen, const TransformKernel& k,
                                     const std::function<double(double)>& h, double p);

// Painleve-property criterion d5 = d4 (2 d4 - d3)/4 for the autonomous family.
bool painleve_property(double d3, double d4, double d5, double tol = 1e-12);

// phi = chi * exp(+i nu int_{xi0}^{xi} |chi|^2 dxi) on a sampled slice
// (cumulative trapezoid).
std::vector<std::complex<double>> kundu_gauge(const std::vector<double>& xi,
                                              const std::vector<std::complex<double>>& chi,
                                              double nu, double xi0);

}  // namespace nlsframes
