#pragma once

#include "aos/transactions/json.hpp"

namespace aos::tx {

/// Encrypts a signed transaction to `recipient_public`. Type B invocations
/// keep a cleartext copy in `reveal`; Type A payloads stay opaque to everyone
/// but the recipient.
inline SealedTransaction seal(const SignedTransaction& signed_tx, const PublicKey& recipient_public) {
  SealedTransaction s;
  s.tx_id = signed_tx.tx_id();
  s.tx_type = signed_tx.body.tx_type;
  s.recipient_hint = recipient_hint_of(recipient_public);
  s.ciphertext = seal_bytes(as_bytes(to_json_value(signed_tx).dump()), recipient_public);
  if (s.tx_type == TxType::TypeB) s.reveal = signed_tx;
  return s;
}

/// Decrypts with the recipient's key and accepts the payload only if its
/// signature verifies under the sender named inside it.
inline SignedTransaction open_and_verify(const SealedTransaction& sealed, const SecretKey& recipient_private) {
  if (recipient_hint_of(public_key_of(recipient_private)) != sealed.recipient_hint)
    throw Error(Errc::DecryptFailed, "transaction is not addressed to this key");
  const Bytes plain = open_bytes(sealed.ciphertext, recipient_private);
  SignedTransaction inner;
  try {
    inner = signed_from_json(json::parse(plain.begin(), plain.end()));
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, e.what());
  }
  if (!inner.verify()) throw Error(Errc::BadSignature, "sender signature does not verify");
  if (inner.tx_id() != sealed.tx_id) throw Error(Errc::Malformed, "sealed tx_id does not match the payload");
  return inner;
}

}  // namespace aos::tx
