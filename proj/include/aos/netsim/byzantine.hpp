#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "aos/agreement/replica.hpp"

namespace aos::netsim {

using agreement::AgreementMessage;
using agreement::MessageKind;
using agreement::NetworkConfig;
using agreement::Outbound;
using proposals::Proposal;
using proposals::ProposalRef;

struct Equivocation {
  AgreementMessage first;
  AgreementMessage second;
  std::vector<NodeId> first_peers;
  std::vector<NodeId> second_peers;
};

/// Two proposals for the same height that differ only in timestamp, for
/// disjoint halves of the peers (split after an rng shuffle).
template <typename Rng>
Equivocation inject_equivocation(NodeId self, const NetworkConfig& cfg, const KeyPair& keys, const ledger::Block& tip,
                                 const ProposalRef& last_committed, std::int64_t now, Rng& rng) {
  Proposal a = proposals::create_proposal(self, cfg.n, tip, {}, last_committed, now);
  Proposal b = proposals::create_proposal(self, cfg.n, tip, {}, last_committed, now + 1);
  std::vector<NodeId> peers;
  for (std::uint32_t id = 1; id <= cfg.n; ++id)
    if (id != self.value) peers.push_back(NodeId{id});
  std::shuffle(peers.begin(), peers.end(), rng);
  const auto half = static_cast<std::ptrdiff_t>((peers.size() + 1) / 2);
  Equivocation eq{agreement::make_created(a, self, keys.private_key), agreement::make_created(b, self, keys.private_key),
                  {peers.begin(), peers.begin() + half}, {peers.begin() + half, peers.end()}};
  std::sort(eq.first_peers.begin(), eq.first_peers.end());
  std::sort(eq.second_peers.begin(), eq.second_peers.end());
  return eq;
}

/// Equivocating proposer that also votes accept and resolution for every
/// proposal it sees. It tracks the chain through commit certificates so it
/// can keep equivocating at later heights.
class Equivocator {
 public:
  Equivocator(NodeId self, NetworkConfig cfg, KeyPair keys) : self_(self), cfg_(cfg), keys_(std::move(keys)) {}

  BlockIndex height() const { return chain_.height(); }
  const ledger::Chain& chain() const { return chain_; }

  template <typename Rng>
  std::vector<Outbound> tick(std::int64_t now, Rng& rng) {
    std::vector<Outbound> out;
    const std::uint64_t next = chain_.height().height + 1;
    if (chain_.height().height != seen_height_) {
      seen_height_ = chain_.height().height;
      last_progress_ = now;
    }
    if (proposals::pce(cfg_.n, chain_.height()) != self_) {
      // Announce the height it is stuck at so peers that are ahead send
      // their commit certificates.
      if (now - last_progress_ >= cfg_.round_timeout) {
        last_progress_ = now;
        out.push_back({std::nullopt, agreement::make_vote(MessageKind::ProposalResponse, next, Digest{}, self_, false,
                                                          keys_.private_key)});
      }
      return out;
    }
    if (equivocated_.contains(next)) {
      // Keep both halves fed, like an honest proposer retransmitting.
      if (now - last_sent_ >= cfg_.round_timeout) {
        last_sent_ = now;
        return pending_;
      }
      return out;
    }
    equivocated_.insert(next);
    auto eq = inject_equivocation(self_, cfg_, keys_, chain_.tip(), last_, now, rng);
    for (auto id : eq.first_peers) out.push_back({id, eq.first});
    for (auto id : eq.second_peers) out.push_back({id, eq.second});
    vote_for(*eq.first.payload, out);
    vote_for(*eq.second.payload, out);
    pending_ = out;
    last_sent_ = now;
    return out;
  }

  std::vector<Outbound> on_message(const AgreementMessage& m) {
    std::vector<Outbound> out;
    if (m.payload && m.payload->hash == m.proposal_hash) vote_for(*m.payload, out);
    if (m.kind == MessageKind::ProposalResolution) resolutions_[m.proposal_hash].insert(m.sender);
    follow();
    return out;
  }

 private:
  void vote_for(const Proposal& p, std::vector<Outbound>& out) {
    payloads_.try_emplace(p.hash, p);
    if (!voted_.insert(p.hash).second) return;
    const auto h = p.block.header.index.height;
    out.push_back({std::nullopt, agreement::make_vote(MessageKind::ProposalResponse, h, p.hash, self_, true, keys_.private_key)});
    auto r = agreement::make_vote(MessageKind::ProposalResolution, h, p.hash, self_, true, keys_.private_key);
    r.payload = p;
    out.push_back({std::nullopt, std::move(r)});
    resolutions_[p.hash].insert(self_);
    follow();
  }

  void follow() {
    for (bool advanced = true; advanced;) {
      advanced = false;
      for (const auto& [h, voters] : resolutions_) {
        if (voters.size() < cfg_.resolution_quorum) continue;
        auto it = payloads_.find(h);
        if (it == payloads_.end()) continue;
        if (!proposals::pvf(it->second, chain_.height(), last_, chain_.tip().hash).accepted) continue;
        chain_.append(it->second.committed_block());
        last_ = it->second.ref();
        advanced = true;
        break;
      }
    }
  }

  NodeId self_;
  NetworkConfig cfg_;
  KeyPair keys_;
  ledger::Chain chain_;
  ProposalRef last_ = ProposalRef::genesis();
  std::set<std::uint64_t> equivocated_;
  std::vector<Outbound> pending_;
  std::int64_t last_sent_ = 0;
  std::uint64_t seen_height_ = 0;
  std::int64_t last_progress_ = 0;
  std::set<Digest> voted_;
  std::map<Digest, Proposal> payloads_;
  std::map<Digest, std::set<NodeId>> resolutions_;
};

/// Well-formed, correctly signed proposal whose hash does not match its
/// contents. Every honest verifier rejects it.
inline AgreementMessage make_spam(NodeId self, const KeyPair& keys, const ledger::Block& tip,
                                  const ProposalRef& last_committed, std::int64_t now) {
  Proposal p;
  p.proposal_id = last_committed.proposal_id + 1;
  p.proposer = self;
  p.block = ledger::produce_block(tip, {}, self, now);
  p.parent_proposal_hash = last_committed.hash;
  ByteWriter w;
  w.str("spam").u32(self.value).i64(now);
  p.hash = hash(w.data());
  return agreement::make_created(p, self, keys.private_key);
}

}  // namespace aos::netsim
