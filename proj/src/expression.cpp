#include "vemcdr/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace vem {

namespace {

enum class Op { kConst, kVarX, kVarY, kVarT, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSin, kCos, kExp, kSqrt, kAbs };

}  // namespace

struct Expression::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = v;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr run() {
    skip_ws();
    if (pos_ >= s_.size()) fail("empty expression");
    NodePtr e = sum();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  NodePtr sum() {
    NodePtr e = product();
    for (;;) {
      if (eat('+'))
        e = make(Op::kAdd, e, product());
      else if (eat('-'))
        e = make(Op::kSub, e, product());
      else
        return e;
    }
  }

  NodePtr product() {
    NodePtr e = factor();
    for (;;) {
      if (eat('*'))
        e = make(Op::kMul, e, factor());
      else if (eat('/'))
        e = make(Op::kDiv, e, factor());
      else
        return e;
    }
  }

  // factor := '-' factor | power    (unary minus binds looser than '^')
  NodePtr factor() {
    if (eat('-')) return make(Op::kNeg, factor());
    return power();
  }

  // power := atom ['^' factor]     ('^' right-associative)
  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Op::kPow, base, factor());
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected operand");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("expected operand");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make(Op::kConst, nullptr, nullptr, v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "x") return make(Op::kVarX);
    if (name == "y") return make(Op::kVarY);
    if (name == "t") return make(Op::kVarT);
    if (name == "pi") return make(Op::kConst, nullptr, nullptr, M_PI);
    if (name == "e") return make(Op::kConst, nullptr, nullptr, M_E);
    Op fn;
    if (name == "sin")
      fn = Op::kSin;
    else if (name == "cos")
      fn = Op::kCos;
    else if (name == "exp")
      fn = Op::kExp;
    else if (name == "sqrt")
      fn = Op::kSqrt;
    else if (name == "abs")
      fn = Op::kAbs;
    else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!eat('(')) fail("expected '(' after function name");
    NodePtr arg = sum();
    if (!eat(')')) fail("expected ')'");
    return make(fn, arg);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

bool node_is_constant(const Expression::Node& n) {
  switch (n.op) {
    case Op::kVarX:
    case Op::kVarY:
    case Op::kVarT:
      return false;
    default:
      return (!n.a || node_is_constant(*n.a)) && (!n.b || node_is_constant(*n.b));
  }
}

NodePtr differentiate(const NodePtr& n, Op var) {
  auto zero = [] { return make(Op::kConst, nullptr, nullptr, 0.0); };
  auto one = [] { return make(Op::kConst, nullptr, nullptr, 1.0); };
  switch (n->op) {
    case Op::kConst: return zero();
    case Op::kVarX: return var == Op::kVarX ? one() : zero();
    case Op::kVarY: return var == Op::kVarY ? one() : zero();
    case Op::kVarT: return var == Op::kVarT ? one() : zero();
    case Op::kAdd: return make(Op::kAdd, differentiate(n->a, var), differentiate(n->b, var));
    case Op::kSub: return make(Op::kSub, differentiate(n->a, var), differentiate(n->b, var));
    case Op::kMul:
      return make(Op::kAdd, make(Op::kMul, differentiate(n->a, var), n->b),
                  make(Op::kMul, n->a, differentiate(n->b, var)));
    case Op::kDiv:
      return make(Op::kDiv,
                  make(Op::kSub, make(Op::kMul, differentiate(n->a, var), n->b),
                       make(Op::kMul, n->a, differentiate(n->b, var))),
                  make(Op::kMul, n->b, n->b));
    case Op::kPow: {
      if (!node_is_constant(*n->b))
        throw std::invalid_argument("derivative: exponent of '^' must be constant");
      // c * a^(c-1) * a'
      NodePtr cm1 = make(Op::kSub, n->b, make(Op::kConst, nullptr, nullptr, 1.0));
      return make(Op::kMul, make(Op::kMul, n->b, make(Op::kPow, n->a, cm1)),
                  differentiate(n->a, var));
    }
    case Op::kNeg: return make(Op::kNeg, differentiate(n->a, var));
    case Op::kSin: return make(Op::kMul, make(Op::kCos, n->a), differentiate(n->a, var));
    case Op::kCos:
      return make(Op::kNeg, make(Op::kMul, make(Op::kSin, n->a), differentiate(n->a, var)));
    case Op::kExp: return make(Op::kMul, make(Op::kExp, n->a), differentiate(n->a, var));
    case Op::kSqrt:
      return make(Op::kDiv, differentiate(n->a, var),
                  make(Op::kMul, make(Op::kConst, nullptr, nullptr, 2.0), make(Op::kSqrt, n->a)));
    case Op::kAbs:
      // sign(a) a' as a/|a| * a'; undefined at a = 0
      return make(Op::kMul, make(Op::kDiv, n->a, make(Op::kAbs, n->a)),
                  differentiate(n->a, var));
  }
  return nullptr;
}

double eval_node(const Expression::Node& n, double x, double y, double t) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVarX: return x;
    case Op::kVarY: return y;
    case Op::kVarT: return t;
    case Op::kAdd: return eval_node(*n.a, x, y, t) + eval_node(*n.b, x, y, t);
    case Op::kSub: return eval_node(*n.a, x, y, t) - eval_node(*n.b, x, y, t);
    case Op::kMul: return eval_node(*n.a, x, y, t) * eval_node(*n.b, x, y, t);
    case Op::kDiv: return eval_node(*n.a, x, y, t) / eval_node(*n.b, x, y, t);
    case Op::kPow: return std::pow(eval_node(*n.a, x, y, t), eval_node(*n.b, x, y, t));
    case Op::kNeg: return -eval_node(*n.a, x, y, t);
    case Op::kSin: return std::sin(eval_node(*n.a, x, y, t));
    case Op::kCos: return std::cos(eval_node(*n.a, x, y, t));
    case Op::kExp: return std::exp(eval_node(*n.a, x, y, t));
    case Op::kSqrt: return std::sqrt(eval_node(*n.a, x, y, t));
    case Op::kAbs: return std::abs(eval_node(*n.a, x, y, t));
  }
  return 0.0;
}

}  // namespace

Expression::Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::~Expression() = default;

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).run();
  e.text_ = text;
  return e;
}

double Expression::eval(double x, double y, double t) const {
  return eval_node(*root_, x, y, t);
}

bool Expression::is_constant() const { return node_is_constant(*root_); }

Expression Expression::derivative(char var) const {
  Op v;
  if (var == 'x')
    v = Op::kVarX;
  else if (var == 'y')
    v = Op::kVarY;
  else if (var == 't')
    v = Op::kVarT;
  else
    throw std::invalid_argument("derivative: variable must be x, y or t");
  Expression e;
  e.root_ = differentiate(root_, v);
  e.text_ = "d/d" + std::string(1, var) + "(" + text_ + ")";
  return e;
}

}  // namespace vem
