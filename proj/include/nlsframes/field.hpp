#pragma once

#include <complex>
#include <string>
#include <vector>

#include "nlsframes/equation.hpp"

namespace nlsframes {

// Uniform spatial grid, periodic convention: x_i = x0 + i*(x1-x0)/n, i<n.
struct Grid1D {
  double x0 = -20.0, x1 = 20.0;
  int n = 1024;
  double length() const { return x1 - x0; }
  double dx() const { return length() / n; }
  double x(int i) const { return x0 + dx() * i; }
  std::vector<double> points() const;
};

// Complex field samples on (x, t); values are row-major, one row per t-slice.
struct WaveField {
  Grid1D x;
  std::vector<double> t;
  std::vector<std::complex<double>> values;
  EquationSpec eq = QuinticFreeEq{};

  std::size_t nt() const { return t.size(); }
  std::complex<double>& at(std::size_t it, std::size_t ix) { return values[it * x.n + ix]; }
  const std::complex<double>& at(std::size_t it, std::size_t ix) const {
    return values[it * x.n + ix];
  }
  std::vector<std::complex<double>> slice(std::size_t it) const;
};

// Samples psi(x, t) on the grid; parallel over t-slices.
WaveField sample_field(const Grid1D& g, const std::vector<double>& t,
                       const std::function<std::complex<double>(double, double)>& psi,
                       const EquationSpec& eq);

void write_field_csv(const WaveField& f, const std::string& path);
WaveField read_field_csv(const std::string& path);
std::string field_metadata_json(const WaveField& f, const std::string& note = "");

}  // namespace nlsframes
