#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "aos/agreement/message.hpp"
#include "aos/ledger/store.hpp"

namespace aos::node {

using nlohmann::json;

inline constexpr int kWireVersion = 1;
inline constexpr std::uint32_t kMaxFrameBytes = 16u << 20;

/// Non-agreement envelope kinds.
inline constexpr const char* kSubmitTx = "SubmitTx";
inline constexpr const char* kSubmitTxReply = "SubmitTxReply";

inline json proposal_to_json(const proposals::Proposal& p) {
  return {{"proposal_id", p.proposal_id},
          {"proposer", p.proposer.value},
          {"parent_proposal_hash", p.parent_proposal_hash.hex()},
          {"hash", p.hash.hex()},
          {"block", ledger::to_json_value(p.block)}};
}

inline proposals::Proposal proposal_from_json(const json& j) {
  proposals::Proposal p;
  p.proposal_id = j.at("proposal_id").get<std::uint64_t>();
  p.proposer = NodeId{j.at("proposer").get<std::uint32_t>()};
  p.parent_proposal_hash = Digest::from_hex(j.at("parent_proposal_hash").get<std::string>());
  p.hash = Digest::from_hex(j.at("hash").get<std::string>());
  p.block = ledger::block_from_json(j.at("block"));
  return p;
}

/// {version, kind, body, signature}. The body is JSON with hex hashes; the
/// signature covers the message's canonical signing bytes, not the JSON.
inline json to_envelope(const agreement::AgreementMessage& m) {
  json body{{"height", m.height},
            {"proposal_hash", m.proposal_hash.hex()},
            {"sender", m.sender.value},
            {"accept", m.accept}};
  if (m.payload) body["payload"] = proposal_to_json(*m.payload);
  return {{"version", kWireVersion},
          {"kind", std::string(agreement::to_string(m.kind))},
          {"body", std::move(body)},
          {"signature", m.signature.hex()}};
}

inline std::optional<agreement::MessageKind> agreement_kind(std::string_view s) {
  using agreement::MessageKind;
  for (auto k : {MessageKind::ProposalCreated, MessageKind::ProposalResponse, MessageKind::ProposalResolution})
    if (agreement::to_string(k) == s) return k;
  return std::nullopt;
}

inline void check_version(const json& env) {
  if (!env.is_object() || !env.contains("version")) throw Error(Errc::Malformed, "envelope without version");
  if (!env.at("version").is_number_integer() || env.at("version").get<int>() != kWireVersion)
    throw Error(Errc::UnsupportedVersion, "wire version " + env.at("version").dump());
}

/// Decodes an agreement envelope. Signature checks happen in the replica,
/// against the registry key of `sender`.
inline agreement::AgreementMessage from_envelope(const json& env) {
  check_version(env);
  try {
    const auto kind = agreement_kind(env.at("kind").get<std::string>());
    if (!kind) throw Error(Errc::Malformed, "not an agreement message: " + env.at("kind").dump());
    const json& b = env.at("body");
    agreement::AgreementMessage m;
    m.kind = *kind;
    m.height = b.at("height").get<std::uint64_t>();
    m.proposal_hash = Digest::from_hex(b.at("proposal_hash").get<std::string>());
    m.sender = NodeId{b.at("sender").get<std::uint32_t>()};
    m.accept = b.at("accept").get<bool>();
    if (b.contains("payload")) m.payload = proposal_from_json(b.at("payload"));
    m.signature = Signature::from_hex(env.at("signature").get<std::string>());
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::BadHex || e.code() == Errc::Corrupt) throw Error(Errc::Malformed, e.what());
    throw;
  }
}

inline json submit_envelope(const tx::SealedTransaction& s) {
  return {{"version", kWireVersion}, {"kind", kSubmitTx}, {"body", tx::to_json_value(s)}, {"signature", ""}};
}

inline json submit_reply(const std::string& status, const std::optional<Digest>& tx_id, const std::string& error = {}) {
  json body{{"status", status}};
  if (tx_id) body["tx_id"] = tx_id->hex();
  if (!error.empty()) body["error"] = error;
  return {{"version", kWireVersion}, {"kind", kSubmitTxReply}, {"body", std::move(body)}, {"signature", ""}};
}

/// u32 big-endian length, then the payload.
inline std::string encode_frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw Error(Errc::Malformed, "frame too large");
  std::string out;
  const auto n = static_cast<std::uint32_t>(payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

inline std::uint32_t decode_frame_length(const unsigned char (&h)[4]) {
  return (std::uint32_t{h[0]} << 24) | (std::uint32_t{h[1]} << 16) | (std::uint32_t{h[2]} << 8) | std::uint32_t{h[3]};
}

}  // namespace aos::node
