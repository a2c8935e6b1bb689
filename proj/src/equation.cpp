#include "nlsframes/equation.hpp"

#include <sstream>
#include <stdexcept>

namespace nlsframes {

std::string equation_name(const EquationSpec& eq) {
  struct Visitor {
    std::string operator()(const GeneralVariableEq& e) const {
      return "general-variable(" + (e.scen ? e.scen->name : std::string("?")) + ")";
    }
    std::string operator()(const AutonomousStandardEq& e) const {
      std::ostringstream os;
      os << "standard(c0=" << e.c0 << ")";
      return os.str();
    }
    std::string operator()(const LinearFreeEq&) const { return "linear-free"; }
    std::string operator()(const CubicEq& e) const {
      return e.sign > 0 ? "cubic+" : "cubic-";
    }
    std::string operator()(const QuinticFreeEq& e) const {
      return e.sign > 0 ? "quintic+" : "quintic-";
    }
    std::string operator()(const QuinticTrapEq& e) const {
      return e.sign > 0 ? "quintic-trap+" : "quintic-trap-";
    }
    std::string operator()(const CubicLinearPotentialEq& e) const {
      return "linear-potential:" + std::to_string(e.k);
    }
    std::string operator()(const DnlsTrapEq& e) const {
      return "dnls-trap:" + std::to_string(e.d3) + "," + std::to_string(e.d5);
    }
    std::string operator()(const CglQuinticEq&) const { return "cgl-quintic"; }
    std::string operator()(const PivTrapEq&) const { return "piv-trap"; }
  };
  return std::visit(Visitor{}, eq);
}

namespace {
std::vector<double> parse_params(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}
}  // namespace

EquationSpec parse_equation(const std::string& text) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "linear-free") return LinearFreeEq{};
  if (head == "cubic+") return CubicEq{+1};
  if (head == "cubic-") return CubicEq{-1};
  if (head == "quintic+") return QuinticFreeEq{+1};
  if (head == "quintic-") return QuinticFreeEq{-1};
  if (head == "quintic-trap+") return QuinticTrapEq{+1};
  if (head == "quintic-trap-") return QuinticTrapEq{-1};
  if (head == "piv-trap") return PivTrapEq{};
  if (head == "linear-potential") {
    auto p = parse_params(rest);
    if (p.size() != 1) throw std::invalid_argument("linear-potential:k");
    return CubicLinearPotentialEq{p[0]};
  }
  if (head == "dnls-trap") {
    auto p = parse_params(rest);
    if (p.size() != 2) throw std::invalid_argument("dnls-trap:d3,d5");
    return DnlsTrapEq{p[0], p[1]};
  }
  if (head == "cgl") {
    auto p = parse_params(rest);
    if (p.size() != 7) throw std::invalid_argument("cgl:eps,b1,c1,b3,c3,b5,c5");
    return CglQuinticEq{p[0], p[1], p[2], p[3], p[4], p[5], p[6]};
  }
  if (head == "standard") {
    auto p = parse_params(rest);
    if (p.size() != 7) throw std::invalid_argument("standard:c0,d0,d1,d2,d3,d4,d5");
    AutonomousStandardEq e;
    e.c0 = static_cast<int>(p[0]);
    e.d0 = p[1];
    e.d1 = p[2];
    e.d2 = p[3];
    e.d3 = p[4];
    e.d4 = p[5];
    e.d5 = p[6];
    return e;
  }
  throw std::invalid_argument("unknown equation spec: " + text);
}

}  // namespace nlsframes
