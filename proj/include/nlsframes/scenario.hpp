#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nlsframes/expr.hpp"
#include "nlsframes/spline.hpp"

namespace nlsframes {

// A real-valued function of time: a parsed expression or tabulated samples
// with cubic interpolation. Immutable after construction.
class TimeFunction {
 public:
  TimeFunction();  // constant 0
  static TimeFunction expression(const std::string& source);
  static TimeFunction constant(double v);
  static TimeFunction table(std::vector<double> t, std::vector<double> v, int order = 3);

  double operator()(double t) const;
  double derivative(double t) const;
  bool is_constant() const;
  bool is_table() const { return table_ != nullptr; }
  const TimeExpression* expr() const { return expr_ ? &*expr_ : nullptr; }

 private:
  std::shared_ptr<TimeExpression> expr_, dexpr_;
  struct Table {
    std::vector<double> t, v;
    CubicSpline value, deriv;  // deriv built from 4th-order differenced samples
  };
  std::shared_ptr<const Table> table_;
};

struct CoeffValues {
  double a, b, c, d, f, g;
};

struct CharCoeffs {
  double tau, sigma;
};

// The six time-dependent coefficients of the quadratic-Hamiltonian equation
// i psi_t = -a psi_xx + b x^2 psi - i c x psi_x - i d psi - f x psi
//           + i g psi_x + h |psi|^p psi.
struct Scenario {
  std::string name;
  double t0 = 0.0, t1 = 1.0;
  TimeFunction a, b, c, d, f, g;

  void check_time(double t) const;
  CoeffValues coeffs(double t) const;  // throws if a(t)=0 or t outside domain
  CharCoeffs char_coeffs(double t) const;

  static Scenario from_json_text(const std::string& text);
  static Scenario from_json_file(const std::string& path);
  std::string to_json_text() const;
};

// Built-in demo scenarios, keyed by name.
const std::map<std::string, Scenario>& builtin_scenarios();

// Accepts a file path or "builtin:<name>".
Scenario load_scenario(const std::string& spec);

}  // namespace nlsframes
