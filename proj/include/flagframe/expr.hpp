#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "flagframe/errors.hpp"

namespace flagframe {

// Expression trees for right-hand sides y^(k+1) = f(x, y, y', ..., y^(k)).
//
// Grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | variable | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | log | sqrt
//   variable:= x | y | y' | y'' | ... | y0 | y1 | ...   (y = y0, y' = y1)
// Negation of a literal folds into a negative constant.
enum class ExprOp { constant, variable, neg, sin, cos, exp, log, sqrt, add, sub, mul, div, pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprOp op = ExprOp::constant;
  double value = 0.0;
  int var = 0;  // -1 is x, i >= 0 is y_i
  ExprPtr a, b;
};

inline constexpr int kVarX = -1;

namespace expr {

inline ExprPtr constant(double v) {
  auto e = std::make_shared<Expr>();
  e->value = v;
  return e;
}
inline ExprPtr variable(int i) {
  auto e = std::make_shared<Expr>();
  e->op = ExprOp::variable;
  e->var = i;
  return e;
}
inline bool is_const(const ExprPtr& e, double v) { return e->op == ExprOp::constant && e->value == v; }
inline bool is_const(const ExprPtr& e) { return e->op == ExprOp::constant; }

inline ExprPtr node(ExprOp op, ExprPtr a, ExprPtr b = nullptr) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

// Folding constructors. Folding never changes the value where the unfolded
// tree is defined.
inline ExprPtr neg(const ExprPtr& a) {
  if (is_const(a)) return constant(-a->value);
  if (a->op == ExprOp::neg) return a->a;
  return node(ExprOp::neg, a);
}
inline ExprPtr add(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a) && is_const(b) && std::isfinite(a->value + b->value)) return constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return node(ExprOp::add, a, b);
}
inline ExprPtr sub(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a) && is_const(b) && std::isfinite(a->value - b->value)) return constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(b);
  return node(ExprOp::sub, a, b);
}
inline ExprPtr mul(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a) && is_const(b) && std::isfinite(a->value * b->value)) return constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(b);
  if (is_const(b, -1.0)) return neg(a);
  return node(ExprOp::mul, a, b);
}
inline ExprPtr div(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(a) && is_const(b) && b->value != 0.0 && std::isfinite(a->value / b->value))
    return constant(a->value / b->value);
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  return node(ExprOp::div, a, b);
}
inline ExprPtr pow(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(b, 0.0)) return constant(1.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) {
    double v = std::pow(a->value, b->value);
    if (std::isfinite(v)) return constant(v);
  }
  return node(ExprOp::pow, a, b);
}
inline ExprPtr func(ExprOp op, const ExprPtr& a) { return node(op, a); }

}  // namespace expr

inline bool equal(const ExprPtr& p, const ExprPtr& q) {
  if (p == q) return true;
  if (!p || !q || p->op != q->op) return false;
  switch (p->op) {
    case ExprOp::constant: return p->value == q->value;
    case ExprOp::variable: return p->var == q->var;
    default: return equal(p->a, q->a) && equal(p->b, q->b);
  }
}

namespace detail {

inline const char* func_name(ExprOp op) {
  switch (op) {
    case ExprOp::sin: return "sin";
    case ExprOp::cos: return "cos";
    case ExprOp::exp: return "exp";
    case ExprOp::log: return "log";
    case ExprOp::sqrt: return "sqrt";
    default: return nullptr;
  }
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[40];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

class ExprParser {
 public:
  ExprParser(const std::string& src, int k) : s_(src), k_(k) {}

  ExprPtr parse() {
    ExprPtr e = parse_expr();
    skip();
    if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (accept('+'))
        e = expr::node(ExprOp::add, e, parse_term());
      else if (accept('-'))
        e = expr::node(ExprOp::sub, e, parse_term());
      else
        return e;
    }
  }
  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (accept('*'))
        e = expr::node(ExprOp::mul, e, parse_unary());
      else if (accept('/'))
        e = expr::node(ExprOp::div, e, parse_unary());
      else
        return e;
    }
  }
  ExprPtr parse_unary() {
    if (accept('-')) {
      ExprPtr a = parse_unary();
      if (a->op == ExprOp::constant) return expr::constant(-a->value);
      return expr::node(ExprOp::neg, a);
    }
    return parse_power();
  }
  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^')) return expr::node(ExprOp::pow, base, parse_unary());
    return base;
  }
  ExprPtr parse_primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }
  ExprPtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string tok = s_.substr(start, pos_ - start);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size()) throw ParseError("malformed number '" + tok + "'", start);
    return expr::constant(v);
  }
  ExprPtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string id = s_.substr(start, pos_ - start);
    if (id == "x") return expr::variable(kVarX);
    if (id[0] == 'y') {
      int order = 0;
      if (id.size() == 1) {
        while (pos_ < s_.size() && s_[pos_] == '\'') {
          ++order;
          ++pos_;
        }
      } else {
        for (std::size_t i = 1; i < id.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(id[i]))) throw ParseError("unknown identifier '" + id + "'", start);
        if (id.size() > 4) throw ParseError("derivative order too large in '" + id + "'", start);
        order = std::stoi(id.substr(1));
      }
      if (order > k_)
        throw ParseError("derivative order " + std::to_string(order) + " beyond k = " + std::to_string(k_), start);
      return expr::variable(order);
    }
    ExprOp op;
    if (id == "sin")
      op = ExprOp::sin;
    else if (id == "cos")
      op = ExprOp::cos;
    else if (id == "exp")
      op = ExprOp::exp;
    else if (id == "log")
      op = ExprOp::log;
    else if (id == "sqrt")
      op = ExprOp::sqrt;
    else
      throw ParseError("unknown identifier '" + id + "'", start);
    if (!accept('(')) throw ParseError("expected '(' after " + id, pos_);
    ExprPtr a = parse_expr();
    if (!accept(')')) throw ParseError("expected ')'", pos_);
    return expr::node(op, a);
  }

  const std::string& s_;
  int k_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse_expr(const std::string& src, int k) {
  if (k < 0) throw InputError("parse_expr: k must be non-negative");
  return detail::ExprParser(src, k).parse();
}

// Fully parenthesized; parse_expr(print(e)) is structurally equal to e for
// trees built by the parser or the folding constructors.
inline std::string print(const ExprPtr& e) {
  switch (e->op) {
    case ExprOp::constant: {
      std::string s = detail::format_double(e->value);
      return e->value < 0 || (e->value == 0 && std::signbit(e->value)) ? "(" + s + ")" : s;
    }
    case ExprOp::variable: return e->var == kVarX ? "x" : "y" + std::to_string(e->var);
    case ExprOp::neg: return "(-" + print(e->a) + ")";
    case ExprOp::add: return "(" + print(e->a) + " + " + print(e->b) + ")";
    case ExprOp::sub: return "(" + print(e->a) + " - " + print(e->b) + ")";
    case ExprOp::mul: return "(" + print(e->a) + " * " + print(e->b) + ")";
    case ExprOp::div: return "(" + print(e->a) + " / " + print(e->b) + ")";
    case ExprOp::pow: return "(" + print(e->a) + "^" + print(e->b) + ")";
    default: return std::string(detail::func_name(e->op)) + "(" + print(e->a) + ")";
  }
}

inline int max_variable(const ExprPtr& e) {
  if (!e) return kVarX;
  if (e->op == ExprOp::variable) return e->var;
  return std::max(max_variable(e->a), max_variable(e->b));
}

// env: x and y_0..y_k.
inline double evaluate(const ExprPtr& e, double x, const double* y, int k) {
  auto dom = [](const std::string& m) -> double { throw DomainError(m); };
  double r = 0.0;
  switch (e->op) {
    case ExprOp::constant: return e->value;
    case ExprOp::variable:
      if (e->var == kVarX) return x;
      if (e->var > k) throw InputError("variable y" + std::to_string(e->var) + " beyond k");
      return y[e->var];
    case ExprOp::neg: return -evaluate(e->a, x, y, k);
    case ExprOp::sin: r = std::sin(evaluate(e->a, x, y, k)); break;
    case ExprOp::cos: r = std::cos(evaluate(e->a, x, y, k)); break;
    case ExprOp::exp: r = std::exp(evaluate(e->a, x, y, k)); break;
    case ExprOp::log: {
      double a = evaluate(e->a, x, y, k);
      if (!(a > 0)) dom("log of non-positive value");
      r = std::log(a);
      break;
    }
    case ExprOp::sqrt: {
      double a = evaluate(e->a, x, y, k);
      if (a < 0) dom("sqrt of negative value");
      r = std::sqrt(a);
      break;
    }
    case ExprOp::add: r = evaluate(e->a, x, y, k) + evaluate(e->b, x, y, k); break;
    case ExprOp::sub: r = evaluate(e->a, x, y, k) - evaluate(e->b, x, y, k); break;
    case ExprOp::mul: r = evaluate(e->a, x, y, k) * evaluate(e->b, x, y, k); break;
    case ExprOp::div: {
      double a = evaluate(e->a, x, y, k), b = evaluate(e->b, x, y, k);
      if (std::abs(b) < 1e-300) dom("division by zero");
      r = a / b;
      break;
    }
    case ExprOp::pow: {
      double a = evaluate(e->a, x, y, k), b = evaluate(e->b, x, y, k);
      if (a < 0 && b != std::floor(b)) dom("negative base with non-integer exponent");
      if (a == 0 && b < 0) dom("zero to a negative power");
      r = std::pow(a, b);
      break;
    }
  }
  if (!std::isfinite(r)) dom("non-finite value");
  return r;
}

inline double evaluate(const ExprPtr& e, double x, const std::vector<double>& y) {
  return evaluate(e, x, y.data(), static_cast<int>(y.size()) - 1);
}

// d/d(var), var = kVarX or a y index.
inline ExprPtr differentiate(const ExprPtr& e, int var) {
  using namespace expr;
  switch (e->op) {
    case ExprOp::constant: return constant(0.0);
    case ExprOp::variable: return constant(e->var == var ? 1.0 : 0.0);
    case ExprOp::neg: return neg(differentiate(e->a, var));
    case ExprOp::add: return add(differentiate(e->a, var), differentiate(e->b, var));
    case ExprOp::sub: return sub(differentiate(e->a, var), differentiate(e->b, var));
    case ExprOp::mul:
      return add(mul(differentiate(e->a, var), e->b), mul(e->a, differentiate(e->b, var)));
    case ExprOp::div: {
      ExprPtr da = differentiate(e->a, var), db = differentiate(e->b, var);
      if (is_const(db, 0.0)) return div(da, e->b);
      return div(sub(mul(da, e->b), mul(e->a, db)), pow(e->b, constant(2.0)));
    }
    case ExprOp::pow: {
      ExprPtr da = differentiate(e->a, var), db = differentiate(e->b, var);
      if (is_const(db, 0.0)) {
        if (is_const(e->b)) return mul(mul(e->b, pow(e->a, constant(e->b->value - 1.0))), da);
        return mul(mul(e->b, pow(e->a, sub(e->b, constant(1.0)))), da);
      }
      // a^b (b' log a + b a'/a)
      return mul(e, add(mul(db, func(ExprOp::log, e->a)), div(mul(e->b, da), e->a)));
    }
    case ExprOp::sin: return mul(func(ExprOp::cos, e->a), differentiate(e->a, var));
    case ExprOp::cos: return mul(neg(func(ExprOp::sin, e->a)), differentiate(e->a, var));
    case ExprOp::exp: return mul(e, differentiate(e->a, var));
    case ExprOp::log: return div(differentiate(e->a, var), e->a);
    case ExprOp::sqrt: return div(differentiate(e->a, var), mul(constant(2.0), e));
  }
  throw InternalError("differentiate: unknown node");
}

}  // namespace flagframe
