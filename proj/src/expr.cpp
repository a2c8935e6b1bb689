#include "nlsframes/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace nlsframes {

enum class Op { Num, T, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Tanh };

struct TimeExpression::Node {
  Op op;
  double value = 0.0;  // Op::Num only
  NodePtr a, b;
};

namespace {

using Node = TimeExpression::Node;
using NodePtr = TimeExpression::NodePtr;

NodePtr make_num(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Num;
  n->value = v;
  return n;
}

NodePtr make_node(Op op, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_num(const NodePtr& n, double v) { return n->op == Op::Num && n->value == v; }

// Light simplification so symbolic derivatives stay readable and cheap.
NodePtr simp(Op op, NodePtr a, NodePtr b = nullptr) {
  switch (op) {
    case Op::Add:
      if (is_num(a, 0)) return b;
      if (is_num(b, 0)) return a;
      if (a->op == Op::Num && b->op == Op::Num) return make_num(a->value + b->value);
      break;
    case Op::Sub:
      if (is_num(b, 0)) return a;
      if (a->op == Op::Num && b->op == Op::Num) return make_num(a->value - b->value);
      break;
    case Op::Mul:
      if (is_num(a, 0) || is_num(b, 0)) return make_num(0);
      if (is_num(a, 1)) return b;
      if (is_num(b, 1)) return a;
      if (a->op == Op::Num && b->op == Op::Num) return make_num(a->value * b->value);
      break;
    case Op::Div:
      if (is_num(a, 0)) return make_num(0);
      if (is_num(b, 1)) return a;
      break;
    case Op::Neg:
      if (a->op == Op::Num) return make_num(-a->value);
      break;
    default:
      break;
  }
  return make_node(op, std::move(a), std::move(b));
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make_node(Op::Add, lhs, term());
      else if (eat('-'))
        lhs = make_node(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*'))
        lhs = make_node(Op::Mul, lhs, unary());
      else if (eat('/'))
        lhs = make_node(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make_node(Op::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make_node(Op::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    char c = peek();
    if (c == '(') {
      eat('(');
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("expected number, 't', function or '('");
  }

  NodePtr number() {
    skip_ws();
    std::size_t start = pos_;
    const char* begin = src_.c_str() + start;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ = start + (end - begin);
    return make_num(v);
  }

  NodePtr identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::string name = src_.substr(start, pos_ - start);
    if (name == "t") return make_node(Op::T, nullptr);
    Op op;
    if (name == "sin")
      op = Op::Sin;
    else if (name == "cos")
      op = Op::Cos;
    else if (name == "exp")
      op = Op::Exp;
    else if (name == "tanh")
      op = Op::Tanh;
    else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!eat('(')) fail("expected '(' after function name");
    NodePtr arg = expr();
    if (!eat(')')) fail("expected ')'");
    return make_node(op, arg);
  }
};

double eval_node(const NodePtr& n, double t) {
  switch (n->op) {
    case Op::Num: return n->value;
    case Op::T: return t;
    case Op::Add: return eval_node(n->a, t) + eval_node(n->b, t);
    case Op::Sub: return eval_node(n->a, t) - eval_node(n->b, t);
    case Op::Mul: return eval_node(n->a, t) * eval_node(n->b, t);
    case Op::Div: return eval_node(n->a, t) / eval_node(n->b, t);
    case Op::Pow: return std::pow(eval_node(n->a, t), eval_node(n->b, t));
    case Op::Neg: return -eval_node(n->a, t);
    case Op::Sin: return std::sin(eval_node(n->a, t));
    case Op::Cos: return std::cos(eval_node(n->a, t));
    case Op::Exp: return std::exp(eval_node(n->a, t));
    case Op::Tanh: return std::tanh(eval_node(n->a, t));
  }
  return 0.0;
}

bool depends_on_t(const NodePtr& n) {
  switch (n->op) {
    case Op::Num: return false;
    case Op::T: return true;
    default:
      if (n->a && depends_on_t(n->a)) return true;
      if (n->b && depends_on_t(n->b)) return true;
      return false;
  }
}

NodePtr diff_node(const NodePtr& n) {
  switch (n->op) {
    case Op::Num: return make_num(0);
    case Op::T: return make_num(1);
    case Op::Add: return simp(Op::Add, diff_node(n->a), diff_node(n->b));
    case Op::Sub: return simp(Op::Sub, diff_node(n->a), diff_node(n->b));
    case Op::Mul:
      return simp(Op::Add, simp(Op::Mul, diff_node(n->a), n->b),
                  simp(Op::Mul, n->a, diff_node(n->b)));
    case Op::Div:
      return simp(Op::Div,
                  simp(Op::Sub, simp(Op::Mul, diff_node(n->a), n->b),
                       simp(Op::Mul, n->a, diff_node(n->b))),
                  simp(Op::Pow, n->b, make_num(2)));
    case Op::Pow: {
      if (depends_on_t(n->b))
        throw std::runtime_error("derivative of u^v with non-constant exponent is unsupported");
      // d/dt u^c = c * u^(c-1) * u'
      NodePtr c = n->b;
      NodePtr um1 = simp(Op::Pow, n->a, make_num(eval_node(c, 0.0) - 1.0));
      return simp(Op::Mul, simp(Op::Mul, c, um1), diff_node(n->a));
    }
    case Op::Neg: return simp(Op::Neg, diff_node(n->a));
    case Op::Sin: return simp(Op::Mul, make_node(Op::Cos, n->a), diff_node(n->a));
    case Op::Cos: return simp(Op::Neg, simp(Op::Mul, make_node(Op::Sin, n->a), diff_node(n->a)));
    case Op::Exp: return simp(Op::Mul, make_node(Op::Exp, n->a), diff_node(n->a));
    case Op::Tanh: {
      // 1 - tanh^2
      NodePtr sech2 = simp(Op::Sub, make_num(1), simp(Op::Pow, make_node(Op::Tanh, n->a), make_num(2)));
      return simp(Op::Mul, sech2, diff_node(n->a));
    }
  }
  return make_num(0);
}

std::string num_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_node(const NodePtr& n, std::string& out) {
  switch (n->op) {
    case Op::Num:
      if (n->value < 0) {
        out += "(";
        out += num_str(n->value);
        out += ")";
      } else {
        out += num_str(n->value);
      }
      return;
    case Op::T: out += "t"; return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: {
      out += "(";
      print_node(n->a, out);
      switch (n->op) {
        case Op::Add: out += "+"; break;
        case Op::Sub: out += "-"; break;
        case Op::Mul: out += "*"; break;
        case Op::Div: out += "/"; break;
        default: out += "^"; break;
      }
      print_node(n->b, out);
      out += ")";
      return;
    }
    case Op::Neg:
      out += "(-";
      print_node(n->a, out);
      out += ")";
      return;
    case Op::Sin: out += "sin("; break;
    case Op::Cos: out += "cos("; break;
    case Op::Exp: out += "exp("; break;
    case Op::Tanh: out += "tanh("; break;
  }
  print_node(n->a, out);
  out += ")";
}

}  // namespace

TimeExpression::TimeExpression() : root_(make_num(0)) {}

TimeExpression TimeExpression::parse(const std::string& source) {
  Parser p(source);
  return TimeExpression(p.run());
}

TimeExpression TimeExpression::constant(double value) { return TimeExpression(make_num(value)); }

double TimeExpression::operator()(double t) const { return eval_node(root_, t); }

TimeExpression TimeExpression::derivative() const { return TimeExpression(diff_node(root_)); }

std::string TimeExpression::str() const {
  std::string out;
  print_node(root_, out);
  return out;
}

bool TimeExpression::is_constant() const { return !depends_on_t(root_); }

}  // namespace nlsframes
