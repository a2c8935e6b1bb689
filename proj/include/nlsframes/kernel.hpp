#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlsframes/scenario.hpp"

namespace nlsframes {

// Initial data of the gauge kernel at t0: (mu, alpha, beta, gamma, delta,
// eps, kappa) with beta != 0.
struct KernelInit {
  double mu = 1.0;
  double alpha = 0.0;
  double beta = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  double eps = 0.0;
  double kappa = 0.0;
};

// Standard solutions mu0, mu1 of the characteristic equation
// mu'' - tau(t) mu' + 4 sigma(t) mu = 0 with mu0(t0)=0, mu0'(t0)=2a(t0) and
// mu1(t0)=1, mu1'(t0)=0, together with lambda = exp(-int (c-2d)).
struct FundamentalPair {
  std::vector<double> t;
  std::vector<double> mu0, dmu0, mu1, dmu1, lambda;
  int c0 = 0;             // provenance flag of the requesting kernel family
  double beta0_init = 1;  // beta(0) the pair was requested for

  // Quintic-Hermite dense evaluation (second derivatives from the ODE).
  double eval_mu0(double t) const;
  double eval_dmu0(double t) const;
  double eval_mu1(double t) const;
  double eval_dmu1(double t) const;
  double eval_lambda(double t) const;

  const Scenario* scen = nullptr;  // set by build_fundamental
  std::size_t segment(double t) const;
};

struct CausticEvent {
  double t;
  std::string kind;  // "mu-zero", "alpha-escape", ...
};

// Particular solution of the kernel system with c0=0 built from the pair.
// alpha0/beta0/gamma0 are singular at t0 and at interior zeros of mu0; such
// samples carry valid=0. delta0/eps0/kappa0 are integrated; u = mu0*delta0/lambda
// is the globally regular companion state.
struct Kernel0 {
  std::vector<double> t;
  std::vector<double> alpha0, beta0, gamma0;
  std::vector<double> delta0, eps0, kappa0, u;
  std::vector<std::uint8_t> valid_abc;   // alpha0/beta0/gamma0 usable
  std::vector<std::uint8_t> valid_linear;  // delta0/eps0/kappa0 usable
  bool forcing_zero = false;             // f == g == 0 on the grid
};

struct TransformKernel {
  std::vector<double> t;
  std::vector<double> mu, alpha, beta, gamma, delta, eps, kappa;
  std::vector<double> dmu, dalpha, dbeta, dgamma, ddelta, deps, dkappa;
  std::vector<std::uint8_t> valid;
  KernelInit init;
  int c0 = 0;
  std::vector<CausticEvent> caustics;
  std::string method;  // "riccati-superposition", "direct-ode", ...
};

// Complex frame: z = (2 alpha(0) + d(0)/a(0)) mu0 + mu1 + i beta(0)^2 mu0,
// zeta = c3 + i eps0, E = mu1 + i mu0 and the constants c1, c2, c3.
struct ComplexFrame {
  std::complex<double> c1, c2, c3;
  std::vector<double> t;
  std::vector<std::complex<double>> z, dz, zeta, E;
  std::vector<double> lambda;
  std::vector<std::uint8_t> zeta_valid;
  KernelInit init;
};

// Scenario + fundamental pair + fundamental kernel, the reusable part of all
// superposition formulas.
struct FundamentalSolution {
  Scenario scen;
  FundamentalPair pair;
  Kernel0 k0;
};

FundamentalPair fundamental_pair(const Scenario& s, std::span<const double> t_grid, int c0 = 0,
                                 double beta0_init = 1.0);
Kernel0 fundamental_kernel(const Scenario& s, const FundamentalPair& pair);
FundamentalSolution build_fundamental(const Scenario& s, std::span<const double> t_grid,
                                      int c0 = 0, double beta0_init = 1.0);

// Nonlinear superposition, c0 = 0 (Riccati family).
TransformKernel riccati_superpose(const FundamentalSolution& fs, const KernelInit& init);
// Nonlinear superposition, c0 = 1 (Ermakov family); branch signs fixed by
// continuity from the initial data, angle unwrapped along the grid.
TransformKernel ermakov_superpose(const FundamentalSolution& fs, const KernelInit& init);

ComplexFrame complex_frame(const FundamentalSolution& fs, const KernelInit& init);
TransformKernel kernel_from_frame_riccati(const FundamentalSolution& fs, const ComplexFrame& fr,
                                          const KernelInit& init);
TransformKernel kernel_from_frame_ermakov(const FundamentalSolution& fs, const ComplexFrame& fr,
                                          const KernelInit& init);

// Direct adaptive integration of the six kernel ODEs plus mu' = (4 a alpha + 2 d) mu.
// Oracle for every superposition path. Halts at finite-time escape of alpha.
TransformKernel integrate_riccati_direct(const Scenario& s, const KernelInit& init, int c0,
                                         std::span<const double> t_grid);

struct QuasiInvariantReport {
  double frame_ratio_sup = 0;      // |2i(alpha-alpha0)/beta^2 - (z+z*)/(z-z*)|
  double pinney_invariant_sup = 0; // drift of eps^2 + ((delta-delta0)/beta)^2
  double kappa_identity_sup = 0;
  std::size_t evaluated = 0;
};

QuasiInvariantReport quasi_invariants(const TransformKernel& k, const FundamentalSolution& fs,
                                      const ComplexFrame& fr);

// Cross-check of the quadrature forms of delta0/eps0/kappa0 against the
// integrated values on [t0, t_end]; requires mu0' != 0 there.
struct Kernel0QuadratureCheck {
  double delta_sup = 0, eps_sup = 0, kappa_sup = 0;
};
Kernel0QuadratureCheck kernel0_quadrature_check(const FundamentalSolution& fs, double t_end,
                                                int n_check = 24);

// Residual of mu against the closed characteristic equation
// mu'' - tau mu' + 4 sigma mu = c0 (2a)^2 (beta(0) mu(0) lambda)^4 / mu^3,
// using node derivatives from the kernel system. Sup over valid samples.
double pinney_residual_sup(const Scenario& s, const TransformKernel& k,
                           const FundamentalPair& pair);

// Dense evaluation of a kernel between grid nodes (cubic Hermite on value +
// node derivative). gamma is strictly monotone where a*beta^2 has one sign;
// invert_gamma solves gamma(t) = tau by Newton within the grid span.
class KernelDense {
 public:
  KernelDense(const TransformKernel& k);
  double mu(double t) const;
  double alpha(double t) const;
  double beta(double t) const;
  double gamma(double t) const;
  double delta(double t) const;
  double eps(double t) const;
  double kappa(double t) const;
  double invert_gamma(double tau) const;
  double t_min() const { return k_->t.front(); }
  double t_max() const { return k_->t.back(); }

 private:
  const TransformKernel* k_;
  double eval(const std::vector<double>& y, const std::vector<double>& dy, double t) const;
  std::size_t segment(double t) const;
};

// CSV dump (t, mu, alpha, beta, gamma, delta, eps, kappa, valid_flag) plus a
// JSON sidecar with the initial data and caustic events.
void write_kernel_csv(const TransformKernel& k, const std::string& path);
std::string kernel_sidecar_json(const TransformKernel& k);

}  // namespace nlsframes
