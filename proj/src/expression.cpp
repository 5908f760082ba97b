#include "symcomp/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace symcomp {

struct Expression::Node {
  enum class Op { number, var_x, var_y, var_z, var_r, neg, add, sub, mul, div, pow, call } op;
  double number = 0.0;
  double (*fn1)(double) = nullptr;
  double (*fn2)(double, double) = nullptr;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

double fmin2(double a, double b) { return std::fmin(a, b); }
double fmax2(double a, double b) { return std::fmax(a, b); }
double fpow2(double a, double b) { return std::pow(a, b); }

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse_all(bool& radial) {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    radial = radial_;
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ExpressionError("expression \"" + std::string(s_) + "\" column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make(Op::add, {lhs, term()});
      else if (eat('-'))
        lhs = make(Op::sub, {lhs, term()});
      else
        return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*'))
        lhs = make(Op::mul, {lhs, unary()});
      else if (eat('/'))
        lhs = make(Op::div, {lhs, unary()});
      else
        return lhs;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Op::neg, {unary()});
    if (eat('+')) return unary();
    return power();
  }
  // right associative, binds tighter than unary minus on the left: -x^2 = -(x^2)
  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make(Op::pow, {base, unary()});
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (eat('(')) {
      NodePtr n = expr();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected character '" + std::string(1, c) + "'");
  }
  NodePtr number() {
    const std::size_t start = pos_;
    std::string buf(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str()) fail("malformed number");
    pos_ = start + static_cast<std::size_t>(end - buf.c_str());
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::number;
    n->number = v;
    return n;
  }
  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    if (id == "x" || id == "y" || id == "z") {
      radial_ = false;
      return make(id == "x" ? Op::var_x : id == "y" ? Op::var_y : Op::var_z);
    }
    if (id == "r") return make(Op::var_r);
    if (id == "pi") {
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::number;
      n->number = std::numbers::pi;
      return n;
    }
    static const struct {
      const char* name;
      double (*f)(double);
    } unary_fns[] = {{"sin", [](double a) { return std::sin(a); }},   {"cos", [](double a) { return std::cos(a); }},
                     {"tan", [](double a) { return std::tan(a); }},   {"exp", [](double a) { return std::exp(a); }},
                     {"log", [](double a) { return std::log(a); }},   {"sqrt", [](double a) { return std::sqrt(a); }},
                     {"abs", [](double a) { return std::abs(a); }},   {"atan", [](double a) { return std::atan(a); }}};
    static const struct {
      const char* name;
      double (*f)(double, double);
    } binary_fns[] = {{"min", fmin2}, {"max", fmax2}, {"pow", fpow2}};
    for (const auto& u : unary_fns)
      if (id == u.name) {
        if (!eat('(')) fail("expected '(' after " + id);
        NodePtr a = expr();
        if (!eat(')')) fail("expected ')'");
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::call;
        n->fn1 = u.f;
        n->args = {a};
        return n;
      }
    for (const auto& b : binary_fns)
      if (id == b.name) {
        if (!eat('(')) fail("expected '(' after " + id);
        NodePtr a = expr();
        if (!eat(',')) fail("expected ','");
        NodePtr c = expr();
        if (!eat(')')) fail("expected ')'");
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::call;
        n->fn2 = b.f;
        n->args = {a, c};
        return n;
      }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  bool radial_ = true;
};

double eval(const Expression::Node& n, const ExprVars& v) {
  switch (n.op) {
    case Op::number: return n.number;
    case Op::var_x: return v.x;
    case Op::var_y: return v.y;
    case Op::var_z: return v.z;
    case Op::var_r: return v.r;
    case Op::neg: return -eval(*n.args[0], v);
    case Op::add: return eval(*n.args[0], v) + eval(*n.args[1], v);
    case Op::sub: return eval(*n.args[0], v) - eval(*n.args[1], v);
    case Op::mul: return eval(*n.args[0], v) * eval(*n.args[1], v);
    case Op::div: return eval(*n.args[0], v) / eval(*n.args[1], v);
    case Op::pow: return std::pow(eval(*n.args[0], v), eval(*n.args[1], v));
    case Op::call:
      return n.fn1 ? n.fn1(eval(*n.args[0], v)) : n.fn2(eval(*n.args[0], v), eval(*n.args[1], v));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  Parser p(text);
  e.root_ = p.parse_all(e.radial_only_);
  e.text_ = std::string(text);
  return e;
}

double Expression::operator()(const ExprVars& v) const { return eval(*root_, v); }

}  // namespace symcomp
