#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace nlsframes {

struct ParseError : std::runtime_error {
  std::size_t offset;  // byte offset into the source string
  ParseError(const std::string& msg, std::size_t off)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

// Immutable arithmetic expression in the single variable t.
// Grammar: + - * / ^ (right assoc), unary minus, sin, cos, exp, tanh.
// Precedence: ^  >  unary -  >  * /  >  + -.
class TimeExpression {
 public:
  TimeExpression();  // constant 0
  static TimeExpression parse(const std::string& source);
  static TimeExpression constant(double value);

  double operator()(double t) const;
  TimeExpression derivative() const;
  std::string str() const;
  bool is_constant() const;

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  explicit TimeExpression(NodePtr n) : root_(std::move(n)) {}
  const NodePtr& root() const { return root_; }

 private:
  NodePtr root_;
};

}  // namespace nlsframes
