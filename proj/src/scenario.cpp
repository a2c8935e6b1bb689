#include "nlsframes/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nlsframes {

using nlohmann::json;

TimeFunction::TimeFunction() : expr_(std::make_shared<TimeExpression>(TimeExpression::constant(0))) {
  dexpr_ = std::make_shared<TimeExpression>(TimeExpression::constant(0));
}

TimeFunction TimeFunction::expression(const std::string& source) {
  TimeFunction f;
  f.expr_ = std::make_shared<TimeExpression>(TimeExpression::parse(source));
  f.dexpr_ = std::make_shared<TimeExpression>(f.expr_->derivative());
  return f;
}

TimeFunction TimeFunction::constant(double v) {
  TimeFunction f;
  f.expr_ = std::make_shared<TimeExpression>(TimeExpression::constant(v));
  f.dexpr_ = std::make_shared<TimeExpression>(TimeExpression::constant(0));
  return f;
}

TimeFunction TimeFunction::table(std::vector<double> t, std::vector<double> v, int order) {
  if (order != 3) throw std::invalid_argument("tabulated coefficients support order 3 only");
  if (t.size() < 5) throw std::invalid_argument("tabulated coefficient needs >= 5 samples");
  auto tab = std::make_shared<Table>();
  tab->t = t;
  tab->v = v;
  tab->value = CubicSpline(t, v);
  // Derivative samples: 4th-order centered differences in the interior,
  // one-sided 4th-order stencils at the boundaries (uniform spacing assumed
  // for the stencil; falls back to spline derivative otherwise).
  const std::size_t n = t.size();
  double h = t[1] - t[0];
  bool uniform = true;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (std::abs((t[i + 1] - t[i]) - h) > 1e-9 * std::abs(h)) uniform = false;
  std::vector<double> d(n);
  if (uniform) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= 2 && i + 2 < n)
        d[i] = (-v[i + 2] + 8 * v[i + 1] - 8 * v[i - 1] + v[i - 2]) / (12 * h);
      else if (i + 4 < n && i < 2)
        d[i] = (-25 * v[i] + 48 * v[i + 1] - 36 * v[i + 2] + 16 * v[i + 3] - 3 * v[i + 4]) /
               (12 * h);
      else
        d[i] = (25 * v[i] - 48 * v[i - 1] + 36 * v[i - 2] - 16 * v[i - 3] + 3 * v[i - 4]) /
               (12 * h);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) d[i] = tab->value.derivative(t[i]);
  }
  tab->deriv = CubicSpline(t, d);
  TimeFunction f;
  f.expr_.reset();
  f.dexpr_.reset();
  f.table_ = std::move(tab);
  return f;
}

double TimeFunction::operator()(double t) const {
  if (table_) return table_->value(t);
  return (*expr_)(t);
}

double TimeFunction::derivative(double t) const {
  if (table_) return table_->deriv(t);
  return (*dexpr_)(t);
}

bool TimeFunction::is_constant() const {
  if (table_) return false;
  return expr_->is_constant();
}

void Scenario::check_time(double t) const {
  double pad = 1e-12 * std::max(1.0, std::max(std::abs(t0), std::abs(t1)));
  if (t < t0 - pad || t > t1 + pad)
    throw std::out_of_range("scenario '" + name + "': t=" + std::to_string(t) +
                            " outside [" + std::to_string(t0) + ", " + std::to_string(t1) + "]");
}

CoeffValues Scenario::coeffs(double t) const {
  check_time(t);
  CoeffValues v{a(t), b(t), c(t), d(t), f(t), g(t)};
  if (v.a == 0.0 || !std::isfinite(v.a))
    throw std::domain_error("scenario '" + name + "': a(t) must be finite and nonzero");
  return v;
}

CharCoeffs Scenario::char_coeffs(double t) const {
  CoeffValues v = coeffs(t);
  double ap = a.derivative(t);
  double dp = d.derivative(t);
  double tau = ap / v.a - 2.0 * v.c + 4.0 * v.d;
  // (d/2)(a'/a - d'/d) evaluated in the d->0 regular form (d a'/a - d')/2.
  double sigma = v.a * v.b - v.c * v.d + v.d * v.d + 0.5 * (v.d * ap / v.a - dp);
  return {tau, sigma};
}

namespace {

json fn_to_json(const TimeFunction& f) {
  if (const TimeExpression* e = f.expr()) return json{{"expr", e->str()}};
  throw std::runtime_error("serializing tabulated coefficients is not supported");
}

TimeFunction fn_from_json(const json& j) {
  if (j.is_number()) return TimeFunction::constant(j.get<double>());
  if (j.contains("expr")) return TimeFunction::expression(j.at("expr").get<std::string>());
  if (j.contains("samples")) {
    std::vector<double> t, v;
    for (const auto& row : j.at("samples")) {
      t.push_back(row.at(0).get<double>());
      v.push_back(row.at(1).get<double>());
    }
    int order = j.value("order", 3);
    return TimeFunction::table(std::move(t), std::move(v), order);
  }
  throw std::runtime_error("coefficient entry must be a number, {expr} or {samples}");
}

}  // namespace

Scenario Scenario::from_json_text(const std::string& text) {
  json j = json::parse(text);
  Scenario s;
  s.name = j.value("name", "scenario");
  auto dom = j.at("t_domain");
  s.t0 = dom.at(0).get<double>();
  s.t1 = dom.at(1).get<double>();
  if (!(s.t1 > s.t0)) throw std::runtime_error("t_domain must be an increasing interval");
  auto get = [&](const char* key) {
    return j.contains(key) ? fn_from_json(j.at(key)) : TimeFunction::constant(0);
  };
  s.a = get("a");
  s.b = get("b");
  s.c = get("c");
  s.d = get("d");
  s.f = get("f");
  s.g = get("g");
  return s;
}

Scenario Scenario::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string Scenario::to_json_text() const {
  json j;
  j["name"] = name;
  j["t_domain"] = {t0, t1};
  j["a"] = fn_to_json(a);
  j["b"] = fn_to_json(b);
  j["c"] = fn_to_json(c);
  j["d"] = fn_to_json(d);
  j["f"] = fn_to_json(f);
  j["g"] = fn_to_json(g);
  return j.dump(2);
}

const std::map<std::string, Scenario>& builtin_scenarios() {
  static const std::map<std::string, Scenario> reg = [] {
    std::map<std::string, Scenario> m;
    auto mk = [](const std::string& name, double t0, double t1, const char* a, const char* b,
                 const char* c, const char* d, const char* f, const char* g) {
      Scenario s;
      s.name = name;
      s.t0 = t0;
      s.t1 = t1;
      s.a = TimeFunction::expression(a);
      s.b = TimeFunction::expression(b);
      s.c = TimeFunction::expression(c);
      s.d = TimeFunction::expression(d);
      s.f = TimeFunction::expression(f);
      s.g = TimeFunction::expression(g);
      return s;
    };
    m.emplace("free", mk("free", 0.0, 3.0, "1", "0", "0", "0", "0", "0"));
    m.emplace("fiber", mk("fiber", 0.0, 2.0, "0.5", "0", "0", "0.2", "0", "1"));
    m.emplace("harmonic", mk("harmonic", 0.0, 3.0, "1", "1", "0", "0", "0", "0"));
    m.emplace("driven-harmonic",
              mk("driven-harmonic", 0.0, 1.4, "1", "1", "0", "0", "0.3", "0.2"));
    m.emplace("growing-dispersion",
              mk("growing-dispersion", 0.0, 0.8, "exp(2*t)", "0", "0", "1", "0", "0"));
    m.emplace("modulated-trap",
              mk("modulated-trap", 0.0, 3.0, "1", "1+0.3*sin(2*t)", "0", "0", "0", "0"));
    {
      // Tabulated dispersion a(t) = sin(t) + 2 sampled on 101 points.
      Scenario s;
      s.name = "tabulated-dispersion";
      s.t0 = 0.0;
      s.t1 = 1.0;
      std::vector<double> tt(101), vv(101);
      for (int i = 0; i <= 100; ++i) {
        tt[i] = i / 100.0;
        vv[i] = std::sin(tt[i]) + 2.0;
      }
      s.a = TimeFunction::table(tt, vv);
      s.b = TimeFunction::constant(0);
      s.c = TimeFunction::constant(0);
      s.d = TimeFunction::constant(0);
      s.f = TimeFunction::constant(0);
      s.g = TimeFunction::constant(0);
      m.emplace(s.name, s);
    }
    return m;
  }();
  return reg;
}

Scenario load_scenario(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    auto& reg = builtin_scenarios();
    auto it = reg.find(spec.substr(prefix.size()));
    if (it == reg.end()) throw std::runtime_error("unknown builtin scenario: " + spec);
    return it->second;
  }
  return Scenario::from_json_file(spec);
}

}  // namespace nlsframes
