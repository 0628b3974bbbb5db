#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "aos/txalgebra/expression.hpp"

namespace aos::txalgebra {

// Text syntax, loosest binding first:
//
//   expr    := conj (('|' | '+') conj)*
//   conj    := unary ('&' unary)*
//   unary   := '!' unary | product
//   product := atom ('*' atom)*
//   atom    := IDENT | INT | '(' expr ')'
//
// Within a product, integer atoms multiply into a single scalar and the
// remaining operands are conjoined, so `A * B` is A & B and
// `50 * (A & (B | C))` is Scale(50, ...). An integer standing alone must be
// 0 or 1 and denotes a constant. Fractional numbers are rejected.

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  struct Operand {
    bool is_int = false;
    Units number = 0;
    Expr expr = Expr::constant(false);
  };

  Expr expr() {
    Expr e = conj();
    while (accept('|') || accept('+')) e = Expr::disj(std::move(e), conj());
    return e;
  }

  Expr conj() {
    Expr e = unary();
    while (accept('&')) e = Expr::conj(std::move(e), unary());
    return e;
  }

  Expr unary() {
    if (accept('!')) return Expr::negate(unary());
    return product();
  }

  Expr product() {
    std::vector<Operand> ops;
    ops.push_back(atom());
    while (accept('*')) ops.push_back(atom());

    if (ops.size() == 1) {
      if (!ops[0].is_int) return ops[0].expr;
      if (ops[0].number > 1) fail("bare integer " + std::to_string(ops[0].number) + " is not a constant");
      return Expr::constant(ops[0].number == 1);
    }
    Units delta = 1;
    bool have_scalar = false;
    std::vector<Expr> factors;
    for (auto& op : ops) {
      if (op.is_int) {
        delta = checked_mul(delta, op.number);
        have_scalar = true;
      } else {
        factors.push_back(op.expr);
      }
    }
    if (factors.empty()) fail("product of scalars has no boolean operand");
    Expr body = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) body = Expr::conj(std::move(body), factors[i]);
    return have_scalar ? Expr::scale(delta, std::move(body)) : body;
  }

  Operand atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Operand op;
      op.expr = expr();
      if (!accept(')')) fail("expected ')'");
      return op;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Units v = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        v = checked_mul(v, 10);
        const Units d = static_cast<Units>(src_[pos_] - '0');
        if (v > std::numeric_limits<Units>::max() - d) fail("scalar overflow");
        v += d;
        ++pos_;
      }
      if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
        fail("fractional scalars are not allowed");
      Operand op;
      op.is_int = true;
      op.number = v;
      return op;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      Operand op;
      op.expr = Expr::var(std::string(src_.substr(start, pos_ - start)));
      return op;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::ParseError, why + " at offset " + std::to_string(pos_));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Var: out += e.name(); break;
    case NodeKind::Const: out += e.const_value() ? '1' : '0'; break;
    case NodeKind::Not:
      out += '!';
      print(e.lhs(), out);
      break;
    case NodeKind::Scale:
      out += std::to_string(e.scalar());
      out += " * ";
      if (e.lhs().kind() == NodeKind::Not || e.lhs().kind() == NodeKind::Const) {
        out += '(';
        print(e.lhs(), out);
        out += ')';
      } else {
        print(e.lhs(), out);
      }
      break;
    case NodeKind::And:
    case NodeKind::Or:
      out += '(';
      print(e.lhs(), out);
      out += e.kind() == NodeKind::And ? " & " : " | ";
      print(e.rhs(), out);
      out += ')';
      break;
  }
}

}  // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).parse(); }

/// Canonical text; parse(to_string(e)) == e.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(e, out);
  return out;
}

}  // namespace aos::txalgebra
