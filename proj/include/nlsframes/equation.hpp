#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <variant>

#include "nlsframes/scenario.hpp"

namespace nlsframes {

// Time-dependent complex coefficient used by the variable-coefficient
// residual form.
using TimeCoeff = std::function<std::complex<double>(double)>;

// i psi_t + a psi_xx - b x^2 psi + i c x psi_x + i d psi + f x psi - i g psi_x
//   = h0 psi + (h1 x + h2)|psi|^2 psi + i h3 |psi|^2 psi_x
//     + i h4 psi^2 psi_x^* + h5 |psi|^4 psi
struct GeneralVariableEq {
  std::shared_ptr<const Scenario> scen;
  TimeCoeff h[6];  // any entry may be null (treated as zero)
};

// -i chi_tau + chi_xx - c0 x^2 chi = d0 chi + (d1 x + d2)|chi|^2 chi
//   + i d3 |chi|^2 chi_x + i d4 chi^2 chi_x^* + d5 |chi|^4 chi
struct AutonomousStandardEq {
  int c0 = 0;
  std::complex<double> d0{}, d1{}, d2{}, d3{}, d4{}, d5{};
};

// i psi_t + psi_xx = 0
struct LinearFreeEq {};

// i psi_t + psi_xx = sign * 2 |psi|^2 psi          (sign = +1 defocusing)
struct CubicEq {
  int sign = +1;
};

// i A_t + A_xx + sign * (3/4)|A|^4 A = 0
struct QuinticFreeEq {
  int sign = +1;
};

// i psi_t + psi_xx - x^2 psi + sign * (3/4)|psi|^4 psi = 0
struct QuinticTrapEq {
  int sign = +1;
};

// i psi_t + psi_xx - 2 k x psi = 2 |psi|^2 psi
struct CubicLinearPotentialEq {
  double k = 1.0;
};

// i psi_t + psi_xx - x^2 psi = i d3 (|psi|^2 psi_x + psi^2 psi_x^*) + d5 |psi|^4 psi
struct DnlsTrapEq {
  double d3 = 0.0;
  double d5 = 0.0;
};

// A_t = eps A + (b1 + i c1) A_xx - (b3 - i c3)|A|^2 A - (b5 - i c5)|A|^4 A
struct CglQuinticEq {
  double eps = 0, b1 = 0, c1 = 0, b3 = 0, c3 = 0, b5 = 0, c5 = 0;
};

// i psi_t + psi_xx - (1/4) x^2 psi = 2 x |psi|^2 psi + 3 |psi|^4 psi
struct PivTrapEq {};

using EquationSpec =
    std::variant<GeneralVariableEq, AutonomousStandardEq, LinearFreeEq, CubicEq, QuinticFreeEq,
                 QuinticTrapEq, CubicLinearPotentialEq, DnlsTrapEq, CglQuinticEq, PivTrapEq>;

std::string equation_name(const EquationSpec& eq);

// Parses compact CLI names: "cubic+", "cubic-", "quintic+", "quintic-",
// "quintic-trap+", "quintic-trap-", "linear-potential:k", "dnls-trap:d3,d5",
// "cgl:eps,b1,c1,b3,c3,b5,c5", "piv-trap",
// "standard:c0,d0,d1,d2,d3,d4,d5".
EquationSpec parse_equation(const std::string& text);

}  // namespace nlsframes
