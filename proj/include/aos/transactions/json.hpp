#pragma once

#include <nlohmann/json.hpp>

#include "aos/transactions/transaction.hpp"
#include "aos/txalgebra/parser.hpp"

namespace aos::tx {

using nlohmann::json;

inline json to_json_value(const SignedTransaction& s);

inline json to_json_value(const TransactionBody& b) {
  json j;
  j["tx_type"] = std::string(to_string(b.tx_type));
  j["sender"] = b.sender.hex();
  j["recipient"] = b.recipient.hex();
  j["value"] = b.value;
  if (b.program) j["program"] = txalgebra::to_string(*b.program);
  if (b.target_tx_id) j["target_tx_id"] = b.target_tx_id->hex();
  if (!b.bindings.empty()) {
    json bind = json::object();
    for (const auto& [name, bit] : b.bindings) bind[name] = bit ? 1 : 0;
    j["bindings"] = std::move(bind);
  }
  if (b.disclosure) j["disclosure"] = to_json_value(*b.disclosure);
  return j;
}

inline json to_json_value(const SignedTransaction& s) {
  return json{{"body", to_json_value(s.body)}, {"signature", s.signature.hex()}};
}

inline json to_json_value(const SealedTransaction& s) {
  json j{{"tx_id", s.tx_id.hex()},
         {"tx_type", std::string(to_string(s.tx_type))},
         {"recipient_hint", s.recipient_hint.hex()},
         {"ciphertext", to_hex(s.ciphertext)}};
  if (s.reveal) j["reveal"] = to_json_value(*s.reveal);
  return j;
}

namespace detail {
inline TxType parse_type(const json& j) {
  const auto t = j.get<std::string>();
  if (t == "A") return TxType::TypeA;
  if (t == "B") return TxType::TypeB;
  throw Error(Errc::Malformed, "tx_type must be A or B");
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::BadHex || e.code() == Errc::ParseError) throw Error(Errc::Malformed, e.what());
    throw;
  }
}
}  // namespace detail

inline SignedTransaction signed_from_json(const json& j);

inline TransactionBody body_from_json(const json& j) {
  return detail::guarded([&] {
    TransactionBody b;
    b.tx_type = detail::parse_type(j.at("tx_type"));
    b.sender = PublicKey::from_hex(j.at("sender").get<std::string>());
    b.recipient = PublicKey::from_hex(j.at("recipient").get<std::string>());
    b.value = j.at("value").get<Units>();
    if (j.contains("program")) b.program = txalgebra::parse(j.at("program").get<std::string>());
    if (j.contains("target_tx_id")) b.target_tx_id = Digest::from_hex(j.at("target_tx_id").get<std::string>());
    if (j.contains("bindings")) {
      for (const auto& [name, v] : j.at("bindings").items()) {
        const int bit = v.get<int>();
        if (bit != 0 && bit != 1) throw Error(Errc::Malformed, "binding " + name + " must be 0 or 1");
        b.bindings[name] = bit == 1;
      }
    }
    if (j.contains("disclosure"))
      b.disclosure = std::make_shared<const SignedTransaction>(signed_from_json(j.at("disclosure")));
    return b;
  });
}

inline SignedTransaction signed_from_json(const json& j) {
  return detail::guarded([&] {
    return SignedTransaction{body_from_json(j.at("body")), Signature::from_hex(j.at("signature").get<std::string>())};
  });
}

inline SealedTransaction sealed_from_json(const json& j) {
  return detail::guarded([&] {
    SealedTransaction s;
    s.tx_id = Digest::from_hex(j.at("tx_id").get<std::string>());
    s.tx_type = detail::parse_type(j.at("tx_type"));
    s.recipient_hint = Digest::from_hex(j.at("recipient_hint").get<std::string>());
    s.ciphertext = from_hex(j.at("ciphertext").get<std::string>());
    if (j.contains("reveal")) s.reveal = signed_from_json(j.at("reveal"));
    return s;
  });
}

}  // namespace aos::tx
