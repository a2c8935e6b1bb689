#include "nlsframes/field.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nlsframes/util.hpp"

namespace nlsframes {

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = x(i);
  return xs;
}

std::vector<std::complex<double>> WaveField::slice(std::size_t it) const {
  return {values.begin() + it * x.n, values.begin() + (it + 1) * x.n};
}

WaveField sample_field(const Grid1D& g, const std::vector<double>& t,
                       const std::function<std::complex<double>(double, double)>& psi,
                       const EquationSpec& eq) {
  WaveField f;
  f.x = g;
  f.t = t;
  f.eq = eq;
  f.values.resize(t.size() * g.n);
  parallel_for(t.size(), [&](std::size_t it) {
    for (int i = 0; i < g.n; ++i) f.at(it, i) = psi(g.x(i), t[it]);
  });
  return f;
}

void write_field_csv(const WaveField& f, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path);
  std::fprintf(fp, "x,t,re,im\n");
  for (std::size_t it = 0; it < f.nt(); ++it)
    for (int i = 0; i < f.x.n; ++i)
      std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", f.x.x(i), f.t[it], f.at(it, i).real(),
                   f.at(it, i).imag());
  std::fclose(fp);
}

WaveField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> xs, ts;
  std::vector<std::complex<double>> vals;
  std::map<double, std::size_t> t_index;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double x, t, re, im;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &x, &t, &re, &im) != 4)
      throw std::runtime_error("malformed field CSV line: " + line);
    if (t_index.find(t) == t_index.end()) {
      t_index.emplace(t, ts.size());
      ts.push_back(t);
    }
    if (ts.size() == 1) xs.push_back(x);
    vals.emplace_back(re, im);
  }
  if (xs.size() < 2) throw std::runtime_error("field CSV too small");
  WaveField f;
  f.x.n = static_cast<int>(xs.size());
  f.x.x0 = xs.front();
  f.x.x1 = xs.front() + (xs[1] - xs[0]) * xs.size();
  f.t = ts;
  f.values = std::move(vals);
  if (f.values.size() != f.t.size() * xs.size())
    throw std::runtime_error("field CSV is not a full rectangular grid");
  return f;
}

std::string field_metadata_json(const WaveField& f, const std::string& note) {
  nlohmann::json j;
  j["grid"] = {{"x0", f.x.x0}, {"x1", f.x.x1}, {"nx", f.x.n}};
  j["t"] = {{"t0", f.t.front()}, {"t1", f.t.back()}, {"nt", f.t.size()}};
  j["equation"] = equation_name(f.eq);
  if (!note.empty()) j["note"] = note;
  return j.dump(2);
}

}  // namespace nlsframes
