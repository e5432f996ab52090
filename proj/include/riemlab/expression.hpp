#pragma once

// Arithmetic expressions in chart coordinates for manifest metric entries.
//
// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
// Names: x0..x5 (aliases x, y, z, w for the first four), pi, e.
// Functions: sin cos tan exp log sqrt sinh cosh tanh abs.

#include "riemlab/errors.hpp"
#include "riemlab/linalg.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace riemlab {

class Expression {
 public:
  Expression() = default;

  /// Parses text for a chart of dimension n; variables beyond n are rejected.
  static Expression parse(const std::string& text, int n) {
    Parser p{text, 0, n};
    Expression e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    e.text_ = text;
    return e;
  }

  double operator()(const Vec& x) const { return eval(*root_, x); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { constant, variable, add, sub, mul, div, pow, neg, call };
  using Fn = double (*)(double);

  struct Node {
    Op op = Op::constant;
    double value = 0.0;
    int index = 0;
    Fn fn = nullptr;
    std::shared_ptr<const Node> a, b;
  };
  using Ptr = std::shared_ptr<const Node>;

  static double eval(const Node& n, const Vec& x) {
    switch (n.op) {
      case Op::constant: return n.value;
      case Op::variable: return x[n.index];
      case Op::add: return eval(*n.a, x) + eval(*n.b, x);
      case Op::sub: return eval(*n.a, x) - eval(*n.b, x);
      case Op::mul: return eval(*n.a, x) * eval(*n.b, x);
      case Op::div: return eval(*n.a, x) / eval(*n.b, x);
      case Op::pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
      case Op::neg: return -eval(*n.a, x);
      case Op::call: return n.fn(eval(*n.a, x));
    }
    return 0.0;
  }

  static Ptr make(Op op, Ptr a = nullptr, Ptr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;
    int n;

    [[noreturn]] void fail(const std::string& what) const {
      throw ConfigError("expression '" + s + "' at position " + std::to_string(pos) + ": " + what);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    Ptr expr() {
      Ptr left = term();
      for (;;) {
        if (accept('+'))
          left = make(Op::add, left, term());
        else if (accept('-'))
          left = make(Op::sub, left, term());
        else
          return left;
      }
    }
    Ptr term() {
      Ptr left = unary();
      for (;;) {
        if (accept('*'))
          left = make(Op::mul, left, unary());
        else if (accept('/'))
          left = make(Op::div, left, unary());
        else
          return left;
      }
    }
    Ptr unary() {
      if (accept('-')) return make(Op::neg, unary());
      if (accept('+')) return unary();
      return power();
    }
    Ptr power() {
      Ptr base = atom();
      if (accept('^')) return make(Op::pow, base, unary());
      return base;
    }
    Ptr atom() {
      skip();
      if (pos >= s.size()) fail("unexpected end");
      if (accept('(')) {
        Ptr inner = expr();
        if (!accept(')')) fail("missing ')'");
        return inner;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c))) return name();
      fail("unexpected '" + std::string(1, c) + "'");
    }
    Ptr number() {
      const char* begin = s.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos += static_cast<std::size_t>(end - begin);
      auto node = std::make_shared<Node>();
      node->value = v;
      return node;
    }
    Ptr name() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      const std::string id = s.substr(start, pos - start);
      if (accept('(')) {
        Ptr arg = expr();
        if (!accept(')')) fail("missing ')' after argument of " + id);
        auto node = std::make_shared<Node>();
        node->op = Op::call;
        node->fn = function(id);
        node->a = arg;
        return node;
      }
      auto node = std::make_shared<Node>();
      if (id == "pi") {
        node->value = std::numbers::pi;
        return node;
      }
      if (id == "e") {
        node->value = std::numbers::e;
        return node;
      }
      int index = -1;
      if (id == "x" || id == "y" || id == "z" || id == "w")
        index = std::string("xyzw").find(id[0]);
      else if (id.size() == 2 && id[0] == 'x' && std::isdigit(static_cast<unsigned char>(id[1])))
        index = id[1] - '0';
      if (index < 0) fail("unknown name '" + id + "'");
      if (index >= n) fail("variable '" + id + "' exceeds dimension " + std::to_string(n));
      node->op = Op::variable;
      node->index = index;
      return node;
    }
    Fn function(const std::string& id) const {
      static const std::pair<const char*, Fn> table[] = {
          {"sin", [](double v) { return std::sin(v); }},   {"cos", [](double v) { return std::cos(v); }},
          {"tan", [](double v) { return std::tan(v); }},   {"exp", [](double v) { return std::exp(v); }},
          {"log", [](double v) { return std::log(v); }},   {"sqrt", [](double v) { return std::sqrt(v); }},
          {"sinh", [](double v) { return std::sinh(v); }}, {"cosh", [](double v) { return std::cosh(v); }},
          {"tanh", [](double v) { return std::tanh(v); }}, {"abs", [](double v) { return std::abs(v); }},
      };
      for (const auto& [name, fn] : table)
        if (id == name) return fn;
      fail("unknown function '" + id + "'");
    }
  };

  Ptr root_;
  std::string text_;
};

}  // namespace riemlab
