#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "aos/core/bytes.hpp"
#include "aos/core/error.hpp"

namespace aos::txalgebra {

/// Account units; scalars are non-negative integers.
using Units = std::uint64_t;

/// Assignment of {0,1} to variable names.
using Binding = std::map<std::string, bool, std::less<>>;

enum class NodeKind : std::uint8_t { Var = 0, Const = 1, Not = 2, And = 3, Or = 4, Scale = 5 };

class Expr;

namespace detail {
struct Node;
}

/// Immutable expression handle. Copies share structure.
///
/// Semantics are quasi-boolean: Var/Const/Not/Or stay in {0,1}, And is the
/// product of its operands and Scale(d, e) multiplies the scalar d by e. Or is
/// inclusive disjunction, so 1 | 1 = 1 rather than 2. Scale may only wrap the
/// whole expression or an operand of a conjunction; it never appears below
/// Not or Or.
class Expr {
 public:
  static Expr var(std::string name);
  static Expr constant(bool v);
  static Expr negate(Expr e);
  static Expr conj(Expr a, Expr b);
  static Expr disj(Expr a, Expr b);
  static Expr scale(Units delta, Expr e);

  NodeKind kind() const;
  const std::string& name() const;  // Var
  bool const_value() const;         // Const
  Units scalar() const;             // Scale
  const Expr& lhs() const;          // Not, Scale (operand), And/Or (left)
  const Expr& rhs() const;          // And/Or (right)

  bool operator==(const Expr& o) const;

 private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  NodeKind kind;
  std::string name;
  bool value = false;
  Units scalar = 0;
  Expr lhs;
  Expr rhs;
};

inline bool contains_scale(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Var:
    case NodeKind::Const: return false;
    case NodeKind::Scale: return true;
    case NodeKind::Not: return contains_scale(e.lhs());
    case NodeKind::And:
    case NodeKind::Or: return contains_scale(e.lhs()) || contains_scale(e.rhs());
  }
  return false;
}

inline Units checked_mul(Units a, Units b) {
  if (a != 0 && b > std::numeric_limits<Units>::max() / a) throw Error(Errc::OutOfRange, "scalar overflow");
  return a * b;
}
}  // namespace detail

inline Expr Expr::var(std::string name) {
  if (name.empty()) throw Error(Errc::ParseError, "empty variable name");
  return Expr(std::make_shared<const detail::Node>(detail::Node{NodeKind::Var, std::move(name), false, 0, Expr(nullptr), Expr(nullptr)}));
}

inline Expr Expr::constant(bool v) {
  return Expr(std::make_shared<const detail::Node>(detail::Node{NodeKind::Const, {}, v, 0, Expr(nullptr), Expr(nullptr)}));
}

inline Expr Expr::negate(Expr e) {
  if (detail::contains_scale(e)) throw Error(Errc::ParseError, "scalar under negation");
  return Expr(std::make_shared<const detail::Node>(detail::Node{NodeKind::Not, {}, false, 0, std::move(e), Expr(nullptr)}));
}

inline Expr Expr::conj(Expr a, Expr b) {
  return Expr(std::make_shared<const detail::Node>(detail::Node{NodeKind::And, {}, false, 0, std::move(a), std::move(b)}));
}

inline Expr Expr::disj(Expr a, Expr b) {
  if (detail::contains_scale(a) || detail::contains_scale(b)) throw Error(Errc::ParseError, "scalar under disjunction");
  return Expr(std::make_shared<const detail::Node>(detail::Node{NodeKind::Or, {}, false, 0, std::move(a), std::move(b)}));
}

inline Expr Expr::scale(Units delta, Expr e) {
  if (e.kind() == NodeKind::Scale) return scale(detail::checked_mul(delta, e.scalar()), e.lhs());
  return Expr(std::make_shared<const detail::Node>(detail::Node{NodeKind::Scale, {}, false, delta, std::move(e), Expr(nullptr)}));
}

inline NodeKind Expr::kind() const { return node_->kind; }
inline const std::string& Expr::name() const { return node_->name; }
inline bool Expr::const_value() const { return node_->value; }
inline Units Expr::scalar() const { return node_->scalar; }
inline const Expr& Expr::lhs() const { return node_->lhs; }
inline const Expr& Expr::rhs() const { return node_->rhs; }

inline bool Expr::operator==(const Expr& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_ || kind() != o.kind()) return false;
  switch (kind()) {
    case NodeKind::Var: return name() == o.name();
    case NodeKind::Const: return const_value() == o.const_value();
    case NodeKind::Not: return lhs() == o.lhs();
    case NodeKind::Scale: return scalar() == o.scalar() && lhs() == o.lhs();
    case NodeKind::And:
    case NodeKind::Or: return lhs() == o.lhs() && rhs() == o.rhs();
  }
  return false;
}

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case NodeKind::Var: out.insert(e.name()); break;
    case NodeKind::Const: break;
    case NodeKind::Not:
    case NodeKind::Scale: collect_variables(e.lhs(), out); break;
    case NodeKind::And:
    case NodeKind::Or:
      collect_variables(e.lhs(), out);
      collect_variables(e.rhs(), out);
      break;
  }
}

inline std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

/// Number of candidate bindings for an expression with `n` unknown boolean
/// variables.
constexpr std::uint64_t search_space(unsigned n) { return n >= 64 ? 0 : (std::uint64_t{1} << n); }

inline Units evaluate(const Expr& e, const Binding& b) {
  switch (e.kind()) {
    case NodeKind::Var: {
      auto it = b.find(e.name());
      if (it == b.end()) throw Error(Errc::UnboundVariable, e.name());
      return it->second ? 1 : 0;
    }
    case NodeKind::Const: return e.const_value() ? 1 : 0;
    case NodeKind::Not: return evaluate(e.lhs(), b) == 0 ? 1 : 0;
    case NodeKind::And: {
      const Units l = evaluate(e.lhs(), b);
      const Units r = evaluate(e.rhs(), b);
      return detail::checked_mul(l, r);
    }
    case NodeKind::Or: return (evaluate(e.lhs(), b) != 0 || evaluate(e.rhs(), b) != 0) ? 1 : 0;
    case NodeKind::Scale: return detail::checked_mul(e.scalar(), evaluate(e.lhs(), b));
  }
  return 0;
}

/// Appends `suffix` to every variable name.
inline Expr rename(const Expr& e, std::string_view suffix) {
  switch (e.kind()) {
    case NodeKind::Var: return Expr::var(e.name() + std::string(suffix));
    case NodeKind::Const: return e;
    case NodeKind::Not: return Expr::negate(rename(e.lhs(), suffix));
    case NodeKind::Scale: return Expr::scale(e.scalar(), rename(e.lhs(), suffix));
    case NodeKind::And: return Expr::conj(rename(e.lhs(), suffix), rename(e.rhs(), suffix));
    case NodeKind::Or: return Expr::disj(rename(e.lhs(), suffix), rename(e.rhs(), suffix));
  }
  return e;
}

/// Cross-transaction conjunction: variables are namespaced with `_t1`/`_t2`
/// and outermost scalars are hoisted into a single Scale over the And, so
/// the result reads R x delta with R a pure conjunction.
inline Expr conjoin(const Expr& t1, const Expr& t2) {
  Units delta = 1;
  bool scaled = false;
  auto strip = [&](const Expr& e) {
    if (e.kind() == NodeKind::Scale) {
      delta = detail::checked_mul(delta, e.scalar());
      scaled = true;
      return e.lhs();
    }
    return e;
  };
  Expr body = Expr::conj(rename(strip(t1), "_t1"), rename(strip(t2), "_t2"));
  return scaled ? Expr::scale(delta, std::move(body)) : body;
}

/// Evaluates a single-bit vote cell written as a double inverter, !!A.
inline Units single_bit(const Expr& e, const Binding& b) {
  if (e.kind() != NodeKind::Not || e.lhs().kind() != NodeKind::Not || e.lhs().lhs().kind() != NodeKind::Var)
    throw Error(Errc::NotDoubleNegation, "expected !!A");
  return evaluate(e, b);
}

/// Prefix binary encoding: one tag byte per node, then Var name (u32-length
/// string), Const bit (u8) or Scale scalar (u64), then children in order.
inline void encode(const Expr& e, ByteWriter& w) {
  w.u8(static_cast<std::uint8_t>(e.kind()));
  switch (e.kind()) {
    case NodeKind::Var: w.str(e.name()); break;
    case NodeKind::Const: w.boolean(e.const_value()); break;
    case NodeKind::Not: encode(e.lhs(), w); break;
    case NodeKind::Scale:
      w.u64(e.scalar());
      encode(e.lhs(), w);
      break;
    case NodeKind::And:
    case NodeKind::Or:
      encode(e.lhs(), w);
      encode(e.rhs(), w);
      break;
  }
}

}  // namespace aos::txalgebra
