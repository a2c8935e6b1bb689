#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "nlsframes/equation.hpp"
#include "nlsframes/field.hpp"

namespace nlsframes {

enum class XDerivMode { spectral, fd8, automatic };

struct ResidualOptions {
  XDerivMode x_mode = XDerivMode::automatic;
  double edge_threshold = 1e-10;  // switches automatic mode to fd8
};

struct ResidualReport {
  double rel_sup = 0;
  double rel_l2 = 0;
  double abs_sup = 0;
  double term_scale = 0;            // sup of the largest constituent term
  std::vector<double> t_evaluated;  // interior slices actually measured
  std::vector<std::size_t> skipped; // singular/edge slices
  std::string x_mode_used;
};

// Plugs the field into its equation with spectral (or 8th-order FD) x
// derivatives and 4th-order central t differences; the residual is normalized
// by the sup of the largest constituent term. Needs >= 8 slices on a uniform
// t grid.
ResidualReport residual(const EquationSpec& eq, const WaveField& field,
                        const ResidualOptions& opt = {});

struct PropagatorConfig {
  double rtol = 1e-10;
  double atol = 1e-10;
  bool dealias = true;            // 2/3 rule on the nonlinear term
  double tail_fraction_halt = 1e-6;  // halt when dealias-band energy exceeds this
  double edge_halt = 1e-6;        // halt when |psi| at the edges exceeds this
  long max_steps = 50'000'000;
};

struct PropagateResult {
  WaveField field;      // sampled at the requested slices (possibly truncated)
  bool halted = false;
  double t_halt = 0;
  std::string reason;
};

// Method-of-lines evolution: spectral space discretization (integrating-factor
// treatment of the constant-coefficient stiff part), adaptive embedded RK in
// time, 2/3 dealiasing. Supported kinds: all Schrodinger-type plus cgl_quintic.
PropagateResult propagate(const EquationSpec& eq, const std::vector<std::complex<double>>& psi0,
                          const Grid1D& g, double t0, const std::vector<double>& t_slices,
                          const PropagatorConfig& cfg = {});

struct ConservationRow {
  double t;
  double norm;
  double energy;
};

struct ConservationReport {
  std::vector<ConservationRow> rows;
  double norm_drift = 0;    // max |norm - norm(0)| / norm(0)
  double energy_drift = 0;  // max |E - E(0)| / max(|E(0)|, 1)
  bool conservative_kind = true;
};

ConservationReport conservation_report(const WaveField& run, const EquationSpec& eq);

std::string residual_report_json(const ResidualReport& r, bool mismatch_flag);

}  // namespace nlsframes
