#pragma once

#include <sstream>
#include <string>

#include "aos/txalgebra/expression.hpp"

namespace aos::txalgebra {

namespace detail {
inline int emit_dot(const Expr& e, std::ostringstream& os, int& next) {
  const int id = next++;
  switch (e.kind()) {
    case NodeKind::Var:
      os << "  n" << id << " [shape=plaintext, label=\"" << e.name() << "\"];\n";
      return id;
    case NodeKind::Const:
      os << "  n" << id << " [shape=plaintext, label=\"" << (e.const_value() ? 1 : 0) << "\"];\n";
      return id;
    case NodeKind::Not: os << "  n" << id << " [shape=invtriangle, label=\"NOT\"];\n"; break;
    case NodeKind::And: os << "  n" << id << " [shape=box, label=\"AND\"];\n"; break;
    case NodeKind::Or: os << "  n" << id << " [shape=box, label=\"OR\"];\n"; break;
    case NodeKind::Scale: os << "  n" << id << " [shape=ellipse, label=\"x " << e.scalar() << "\"];\n"; break;
  }
  const int l = emit_dot(e.lhs(), os, next);
  os << "  n" << l << " -> n" << id << ";\n";
  if (e.kind() == NodeKind::And || e.kind() == NodeKind::Or) {
    const int r = emit_dot(e.rhs(), os, next);
    os << "  n" << r << " -> n" << id << ";\n";
  }
  return id;
}
}  // namespace detail

/// Gate-level rendering in Graphviz DOT; inputs flow towards the root gate.
inline std::string to_dot(const Expr& e, const std::string& graph_name = "circuit") {
  std::ostringstream os;
  os << "digraph " << graph_name << " {\n  rankdir=LR;\n";
  int next = 0;
  const int root = detail::emit_dot(e, os, next);
  os << "  out [shape=doublecircle, label=\"out\"];\n  n" << root << " -> out;\n}\n";
  return os.str();
}

}  // namespace aos::txalgebra
