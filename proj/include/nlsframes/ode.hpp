#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nlsframes {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;   // 0 -> automatic
  double h_max = 0.0;    // 0 -> span
  long max_steps = 20'000'000;
};

// Right-hand side f(t, y, dy).
using OdeRhs = std::function<void(double, std::span<const double>, std::span<double>)>;

// One accepted Dormand-Prince 5(4) step with the data needed for the
// 4th-order continuous extension.
struct OdeStep {
  double t0 = 0, t1 = 0;
  std::vector<double> y0, y1;
  std::vector<double> rcont1, rcont2, rcont3, rcont4, rcont5;
  void eval(double t, std::span<double> out) const;
};

struct OdeHaltInfo {
  bool halted = false;
  double t = 0.0;           // time of the halt
  std::string reason;
};

// Integrates from grid.front() to grid.back() landing exactly on every grid
// node; on_node(i, t, y) is called for each node including the first.
// halt(t, y) (optional) stops integration early; the node callback is not
// invoked past the halt point.
OdeHaltInfo integrate_on_grid(const OdeRhs& rhs, std::span<const double> grid,
                              std::vector<double> y0, const OdeOptions& opt,
                              const std::function<void(std::size_t, double, std::span<const double>)>& on_node,
                              const std::function<bool(double, std::span<const double>)>& halt = nullptr);

// Free integration to t_end; steps(optional) collects accepted steps for dense
// output.
OdeHaltInfo integrate_adaptive(const OdeRhs& rhs, double t0, double t_end, std::vector<double>& y,
                               const OdeOptions& opt, std::vector<OdeStep>* steps = nullptr,
                               const std::function<bool(double, std::span<const double>)>& halt = nullptr);

}  // namespace nlsframes
