#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "aos/core.hpp"
#include "aos/proposals.hpp"

namespace aos::agreement {

/// Created ~ PBFT pre-prepare, Response ~ prepare, Resolution ~ commit.
enum class MessageKind : std::uint8_t { ProposalCreated = 0, ProposalResponse = 1, ProposalResolution = 2 };

constexpr std::string_view to_string(MessageKind k) noexcept {
  switch (k) {
    case MessageKind::ProposalCreated: return "ProposalCreated";
    case MessageKind::ProposalResponse: return "ProposalResponse";
    case MessageKind::ProposalResolution: return "ProposalResolution";
  }
  return "?";
}

struct AgreementMessage {
  MessageKind kind = MessageKind::ProposalCreated;
  std::uint64_t height = 0;  // index of the proposed block
  Digest proposal_hash;
  NodeId sender;
  bool accept = false;                          // Response only
  std::optional<proposals::Proposal> payload;  // Created; optional on Resolution
  Signature signature;

  /// u8 kind | u64 height | proposal_hash | u32 sender | u8 accept.
  /// The payload is bound through proposal_hash, which covers it.
  Bytes signing_bytes() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind)).u64(height).raw(proposal_hash.bytes).u32(sender.value).boolean(accept);
    return std::move(w).take();
  }

  void sign_with(const SecretKey& sk) { signature = aos::sign(sk, signing_bytes()); }
  bool verify(const PublicKey& pk) const { return aos::verify(pk, signature, signing_bytes()); }
};

inline AgreementMessage make_created(const proposals::Proposal& p, NodeId sender, const SecretKey& sk) {
  AgreementMessage m;
  m.kind = MessageKind::ProposalCreated;
  m.height = p.block.header.index.height;
  m.proposal_hash = p.hash;
  m.sender = sender;
  m.payload = p;
  m.sign_with(sk);
  return m;
}

inline AgreementMessage make_vote(MessageKind kind, std::uint64_t height, const Digest& h, NodeId sender, bool accept,
                                  const SecretKey& sk) {
  AgreementMessage m;
  m.kind = kind;
  m.height = height;
  m.proposal_hash = h;
  m.sender = sender;
  m.accept = kind == MessageKind::ProposalResponse ? accept : true;
  m.sign_with(sk);
  return m;
}

/// Fault tolerance f = floor((n-1)/3); both quorums are 2f+1.
struct NetworkConfig {
  std::uint32_t n = 1;
  std::uint32_t f = 0;
  std::uint32_t response_quorum = 1;
  std::uint32_t resolution_quorum = 1;
  std::int64_t round_timeout = 1000;

  static NetworkConfig for_nodes(std::uint32_t n, std::int64_t round_timeout) {
    if (n == 0) throw Error(Errc::InvalidNodeCount, "network has no nodes");
    NetworkConfig c;
    c.n = n;
    c.f = (n - 1) / 3;
    c.response_quorum = 2 * c.f + 1;
    c.resolution_quorum = 2 * c.f + 1;
    c.round_timeout = round_timeout;
    return c;
  }
};

}  // namespace aos::agreement
