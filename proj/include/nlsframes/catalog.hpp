#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nlsframes/equation.hpp"
#include "nlsframes/kernel.hpp"
#include "nlsframes/painleve.hpp"

namespace nlsframes {

// A closed-form solution evaluable on arbitrary (x,t) points, tagged with the
// equation it satisfies. Immutable; evaluation is thread-safe.
class Solution {
 public:
  virtual ~Solution() = default;
  virtual std::complex<double> eval(double x, double t) const = 0;
  virtual EquationSpec equation() const = 0;
  virtual std::string family() const = 0;
  virtual std::string descriptor_json() const;
  virtual bool square_integrable() const { return false; }
  // times in [t0,t1] where the closed form is singular (blow-ups, turning points)
  virtual std::vector<double> singular_times(double /*t0*/, double /*t1*/) const { return {}; }
};

using SolutionHandle = std::shared_ptr<const Solution>;

// --- Painleve-II / Airy packets -------------------------------------------

// psi = exp(i(x - vt/2)v/2 + i g (x - vt - 2gt^2/3) t) g^{1/3} F(g^{1/3}(x - vt - g t^2)).
SolutionHandle pii_packet(double g, double v, std::shared_ptr<const PiiProfile> profile);

// Linear limit F -> Ai: the nonspreading accelerating packet of the free equation.
SolutionHandle airy_berry(double g, double v = 0.0);

// Expansion-transformed accelerating Airy solution of the free equation,
// valid for t < t1; t1 = 0 selects the degenerate form (valid for t > 0).
SolutionHandle airy_expansion(double g, double t1);

// psi = exp(i(x - vt/2)v/2 - i g v t^2/2) g^{1/3} A(g^{1/3}(x - vt)), g = 2k.
SolutionHandle const_velocity_packet(double k, double v,
                                     std::shared_ptr<const PiiProfile> profile);

// --- quintic family ---------------------------------------------------------

SolutionHandle quintic_pulse(double phi, double v, double k);
SolutionHandle quintic_source(double phi, double v, double r);

struct GroupInit {
  double alpha = 0.0, beta = 1.0, gamma = 0.0, delta = 0.0, eps = 0.0, kappa = 0.0;
};

// Free-group orbit of a free quintic solution; blow-up at
// x0 = -delta(0)/(2 alpha(0)), t0 = -1/(4 alpha(0)) when alpha(0) != 0.
SolutionHandle blowup_family(SolutionHandle base, const GroupInit& init);

// psi = e^{-(i/2) x^2 tan 2t}/sqrt(cos 2t) A(x/cos 2t, tan(2t)/2).
SolutionHandle gauge_free_to_trap(SolutionHandle base);

SolutionHandle osc_pulse(double phi, double v, double k);
SolutionHandle osc_source(double phi, double v, double r);
SolutionHandle osc_pulse_general(double phi, double v, double k, double alpha0, double beta0,
                                 double delta0, double eps0);

// Harmonic-group orbit of a trapped solution (z = c1 e^{2it} + c2 e^{-2it});
// preserves the trapped equation family. shape_preserving() is true iff
// alpha(0)=0 and beta(0)=+-1.
SolutionHandle group_orbit_trap(SolutionHandle base, const GroupInit& init);
bool group_orbit_shape_preserving(const GroupInit& init);
std::complex<double> group_orbit_c1c2(const GroupInit& init);  // c1 * conj(c2)

// --- elliptic-profile packet ------------------------------------------------

// Profile G with G'^2 = C0 + g0 G^2 + (h0/2) G^4, integrated from a turning
// point (or explicit initial data), with the first integral monitored.
struct EllipticProfile {
  double C0 = 0, g0 = 1, h0 = -0.5;
  std::vector<double> z, G, dG;
  double first_integral_drift = 0.0;
  double eval(double zz) const;
};

std::shared_ptr<const EllipticProfile> integrate_elliptic(double C0, double g0, double h0,
                                                          double z_half_range,
                                                          const double* G0 = nullptr,
                                                          const double* dG0 = nullptr);

struct EllipticParams {
  double phi = 0.0, y = 0.0, g0 = 1.0, h0 = -2.0, C0 = 0.0;
};

// psi = e^{i phi}/sqrt(mu) exp(i(alpha x^2 + beta x y + gamma (y^2 - g0)
//       + delta x + eps y + kappa)) G(beta x + 2 gamma y + eps) on a kernel;
// satisfies the variable-coefficient cubic equation with h(t) = h0 a beta^2 mu.
SolutionHandle elliptic_packet(std::shared_ptr<const TransformKernel> kernel,
                               std::shared_ptr<const Scenario> scen,
                               std::shared_ptr<const EllipticProfile> profile,
                               const EllipticParams& params);

// --- Airy-gun kinematics ------------------------------------------------------

struct AiryGunKinematics {
  double g = 1.0, t1 = 1.0, x0 = 0.0;
  double C1 = 0.0, C2 = 0.0;
  double x(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
  // (t1-t)^2 x'' - (t1-t) x' - x - 2 g t1^2
  double newton_residual(double t) const;
  // Q^2/C2 - (2 C1 + P + C1^2/P), P = x' + C1, Q = x + 2 g t1^2
  double orbit_residual(double t) const;
};

AiryGunKinematics airy_gun(double g, double t1, double x0);

// Catalog listing (family descriptors) for the CLI.
std::string catalog_listing_json();

// Factory from CLI-style family name + key=value parameters.
SolutionHandle make_solution(const std::string& family,
                             const std::vector<std::pair<std::string, double>>& params);

}  // namespace nlsframes
