#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "aos/core.hpp"
#include "aos/txalgebra/expression.hpp"

namespace aos::tx {

using txalgebra::Binding;
using txalgebra::Expr;
using txalgebra::Units;

/// Type A transactions carry a program and wait to be invoked;
/// Type B transactions invoke one committed Type A with bindings.
enum class TxType : std::uint8_t { TypeA = 0, TypeB = 1 };

constexpr std::string_view to_string(TxType t) noexcept { return t == TxType::TypeA ? "A" : "B"; }

struct SignedTransaction;

struct TransactionBody {
  TxType tx_type = TxType::TypeA;
  PublicKey sender;
  PublicKey recipient;
  Units value = 0;
  std::optional<Expr> program;          // TypeA
  std::optional<Digest> target_tx_id;   // TypeB
  Binding bindings;                     // TypeB
  // TypeB: the opened target, disclosed by the invoker so that every replica
  // can evaluate the program it is invoking.
  std::shared_ptr<const SignedTransaction> disclosure;

  Bytes canonical_bytes() const;
  Digest tx_id() const { return hash(canonical_bytes()); }

  bool operator==(const TransactionBody& o) const;
};

struct SignedTransaction {
  TransactionBody body;
  Signature signature;

  Bytes canonical_bytes() const {
    ByteWriter w;
    w.bytes(body.canonical_bytes()).raw(signature.bytes);
    return std::move(w).take();
  }
  Digest tx_id() const { return body.tx_id(); }
  bool verify() const { return aos::verify(body.sender, signature, body.canonical_bytes()); }

  bool operator==(const SignedTransaction&) const = default;
};

/// Layout: u8 type | sender(32) | recipient(32) | u64 value
///         | u8 has_program [program prefix encoding]
///         | u8 has_target [target(32)]
///         | u32 n_bindings (str name | u8 bit)* in name order
///         | u8 has_disclosure [bytes(disclosure canonical)]
inline Bytes TransactionBody::canonical_bytes() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(tx_type)).raw(sender.bytes).raw(recipient.bytes).u64(value);
  w.boolean(program.has_value());
  if (program) txalgebra::encode(*program, w);
  w.boolean(target_tx_id.has_value());
  if (target_tx_id) w.raw(target_tx_id->bytes);
  w.u32(static_cast<std::uint32_t>(bindings.size()));
  for (const auto& [name, bit] : bindings) w.str(name).boolean(bit);
  w.boolean(disclosure != nullptr);
  if (disclosure) w.bytes(disclosure->canonical_bytes());
  return std::move(w).take();
}

inline bool TransactionBody::operator==(const TransactionBody& o) const {
  if (tx_type != o.tx_type || sender != o.sender || recipient != o.recipient || value != o.value ||
      program.has_value() != o.program.has_value() || target_tx_id != o.target_tx_id || bindings != o.bindings)
    return false;
  if (program && !(*program == *o.program)) return false;
  if ((disclosure == nullptr) != (o.disclosure == nullptr)) return false;
  return !disclosure || *disclosure == *o.disclosure;
}

/// Ledger form of a transaction: the signed payload sealed to its recipient.
/// tx_id and tx_type are public so replicas can deduplicate and track Type A
/// outputs without opening anything. Type B invocations also carry `reveal`,
/// the signed invocation in the clear, because every replica must evaluate it.
struct SealedTransaction {
  Digest tx_id;
  TxType tx_type = TxType::TypeA;
  Digest recipient_hint;
  Bytes ciphertext;
  std::optional<SignedTransaction> reveal;

  /// tx_id | u8 type | recipient_hint | bytes(ciphertext) | u8 has_reveal [bytes(reveal)]
  Bytes canonical_bytes() const {
    ByteWriter w;
    w.raw(tx_id.bytes).u8(static_cast<std::uint8_t>(tx_type)).raw(recipient_hint.bytes).bytes(ciphertext);
    w.boolean(reveal.has_value());
    if (reveal) w.bytes(reveal->canonical_bytes());
    return std::move(w).take();
  }

  bool operator==(const SealedTransaction&) const = default;
};

inline Digest recipient_hint_of(const PublicKey& pk) { return hash(ByteView(pk.bytes)); }

/// Signs `body`. The signing key must belong to body.sender.
inline SignedTransaction sign(const TransactionBody& body, const SecretKey& sender_private) {
  if (public_key_of(sender_private) != body.sender)
    throw Error(Errc::KeyMismatch, "signing key does not match the body's sender");
  return SignedTransaction{body, aos::sign(sender_private, body.canonical_bytes())};
}

inline TransactionBody make_type_a(const PublicKey& sender, const PublicKey& recipient, Expr program, Units value) {
  TransactionBody b;
  b.tx_type = TxType::TypeA;
  b.sender = sender;
  b.recipient = recipient;
  b.value = value;
  b.program = std::move(program);
  return b;
}

/// Invocation of `target` by its recipient. The invoker addresses the
/// invocation back to the target's sender.
inline TransactionBody make_type_b(const SignedTransaction& target, Binding bindings) {
  TransactionBody b;
  b.tx_type = TxType::TypeB;
  b.sender = target.body.recipient;
  b.recipient = target.body.sender;
  b.value = 0;
  b.target_tx_id = target.tx_id();
  b.bindings = std::move(bindings);
  b.disclosure = std::make_shared<const SignedTransaction>(target);
  return b;
}

}  // namespace aos::tx
