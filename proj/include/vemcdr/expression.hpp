#pragma once

#include <memory>
#include <string>

namespace vem {

// Arithmetic expressions over the variables {x, y, t} with constants pi and
// e, operators + - * / ^ (with unary minus) and the functions sin, cos, exp,
// sqrt, abs. '^' is right-associative and binds tighter than unary minus.
class Expression {
 public:
  // Throws std::invalid_argument citing the byte offset on malformed input.
  static Expression parse(const std::string& text);

  double eval(double x, double y, double t) const;
  const std::string& text() const { return text_; }

  // True when no variable appears (value independent of x, y, t).
  bool is_constant() const;

  // Symbolic partial derivative with respect to 'x', 'y' or 't'. Exponents of
  // '^' must be variable-free.
  Expression derivative(char var) const;

  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  ~Expression();

  struct Node;  // internal tree node, public only for the implementation file

 private:
  Expression();
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace vem
