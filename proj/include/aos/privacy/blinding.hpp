#pragma once

#include <cstdint>
#include <string>

#include "aos/core/crypto.hpp"
#include "aos/txalgebra/expression.hpp"

namespace aos::privacy {

using txalgebra::Binding;
using txalgebra::Expr;
using txalgebra::NodeKind;
using txalgebra::Units;

inline std::string pad_name(std::uint32_t i) { return "_pad" + std::to_string(i); }

/// Canonical value of pad variable i under `key`: one bit of
/// SHA-256(u32 len | key | u32 i).
inline bool pad_bit(ByteView key, std::uint32_t i) {
  ByteWriter w;
  w.bytes(key).u32(i);
  return (hash(w.data()).bytes[0] & 1u) != 0;
}

/// The pad assignment that sender and receiver both derive from the key.
inline Binding pad_binding(ByteView key, std::uint32_t n_pad) {
  Binding b;
  for (std::uint32_t i = 0; i < n_pad; ++i) b.emplace(pad_name(i), pad_bit(key, i));
  return b;
}

/// Conjoins n_pad extra literals. Literal i is `_pad<i>` when its key bit is
/// 1 and `!_pad<i>` otherwise, so every literal is 1 under pad_binding and
/// the padded expression evaluates like the original. Without the key an
/// observer faces 2^n_pad equally plausible pad assignments.
inline Expr blind_pad(const Expr& e, std::uint32_t n_pad, ByteView key) {
  if (n_pad == 0) return e;
  const auto vars = txalgebra::variables(e);
  Units delta = 1;
  Expr body = e;
  if (e.kind() == NodeKind::Scale) {
    delta = e.scalar();
    body = e.lhs();
  }
  for (std::uint32_t i = 0; i < n_pad; ++i) {
    const std::string name = pad_name(i);
    if (vars.contains(name)) throw Error(Errc::Malformed, "expression already uses " + name);
    Expr lit = Expr::var(name);
    if (!pad_bit(key, i)) lit = Expr::negate(std::move(lit));
    body = Expr::conj(std::move(body), std::move(lit));
  }
  return e.kind() == NodeKind::Scale ? Expr::scale(delta, std::move(body)) : body;
}

inline Expr blind_pad(const Expr& e, std::uint32_t n_pad, std::string_view key) { return blind_pad(e, n_pad, as_bytes(key)); }
inline Binding pad_binding(std::string_view key, std::uint32_t n_pad) { return pad_binding(as_bytes(key), n_pad); }

}  // namespace aos::privacy
