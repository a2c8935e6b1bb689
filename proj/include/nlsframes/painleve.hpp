#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nlsframes {

enum class PiiSign {
  defocusing,  // F'' = z F + 2 F^3
  focusing     // F'' = z F - 2 F^3
};

struct PiiPole {
  double z = 0.0;           // estimated pole location
  double exponent = 0.0;    // fitted local exponent of |F| ~ |z - z_pole|^e
  double strength = 0.0;    // fitted residue-like coefficient
};

// Solution profile of the second Painleve equation on a decreasing z-range,
// stored on an ascending uniform grid with derivatives for dense evaluation.
struct PiiProfile {
  PiiSign sign = PiiSign::defocusing;
  double k0 = 0.0;  // seed amplitude F ~ k0 Ai(z), z -> +inf
  std::vector<double> z, F, dF;
  std::optional<PiiPole> pole;

  double eval(double zz) const;
  double eval_deriv(double zz) const;
  double z_min() const { return z.front(); }
  double z_max() const { return z.back(); }
};

struct PiiSeed {
  double z = 8.0;
  double F = 0.0;
  double dF = 0.0;
};

// F = k0 Ai(z_plus), F' = k0 Ai'(z_plus); z_plus should be >= 6 so the decaying
// branch dominates.
PiiSeed seed_from_airy(double k0, double z_plus = 8.0);

// Integrates leftward from seed.z down to z_to (rightward integration is
// exponentially unstable for the decaying branch). A pole stops integration
// and is located and characterized from the last samples.
PiiProfile integrate_pii(PiiSign sign, const PiiSeed& seed, double z_to, double dz_grid = 0.002);

struct TailFit {
  double r = 0.0;
  double theta0 = 0.0;
  int iterations = 0;
  double rms = 0.0;
};

// Least-squares fit of F ~ r |z|^{-1/4} sin(s(z) - theta0) on [z_a, z_b] with
// s(z) = (2/3)|z|^{3/2} -/+ (3/4) r^2 ln|z| (defocusing/focusing); r enters
// s(z) through fixed-point iteration.
TailFit fit_oscillatory_tail(const PiiProfile& profile, double z_a, double z_b);

enum class ConnectionBranch { defocusing, focusing_quantized, focusing_generic };

struct ConnectionData {
  ConnectionBranch branch = ConnectionBranch::defocusing;
  double r = 0.0;
  double theta0 = 0.0;
  double k0 = 0.0;                      // defocusing / quantized focusing
  int n = 0;                            // quantization index (focusing)
  double alpha_conn = 0.0;              // generic focusing triple
  double beta_conn = 0.0;               // beta^2 >= 0 stored as beta
  double theta_conn = 0.0;
  std::complex<double> xi{};            // generic focusing parameter
};

// Defocusing amplitude connection: r^2 = -ln(1-k0^2)/pi and the phase formula;
// requires 0 < |k0| < 1.
ConnectionData connect_defocusing(double k0);

// Focusing connection from left-tail data (r, theta0): tests the quantization
// condition mod pi (tolerance quant_tol); on the quantized branch recovers k0,
// otherwise returns the generic (alpha, beta, theta) triple.
ConnectionData connect_focusing(double r, double theta0, double quant_tol = 1e-6);

// Residual of u'' = 3u^5 + 2xu^3 + (x^2/4 - n - 1/2)u on a uniform grid via
// 4th-order central differences; relative to the largest constituent term.
struct PivResidual {
  double sup = 0.0;
  double l2 = 0.0;
};
PivResidual piv_residual(const std::vector<double>& x, const std::vector<double>& u, int n);

std::string connection_json(const ConnectionData& c);

}  // namespace nlsframes
