#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "aos/core.hpp"
#include "aos/ledger/block.hpp"

namespace aos::proposals {

enum class ProposalState : std::uint8_t { Created, Response, Resolution, Committed, Rejected };

constexpr std::string_view to_string(ProposalState s) noexcept {
  switch (s) {
    case ProposalState::Created: return "Created";
    case ProposalState::Response: return "Response";
    case ProposalState::Resolution: return "Resolution";
    case ProposalState::Committed: return "Committed";
    case ProposalState::Rejected: return "Rejected";
  }
  return "?";
}

/// Created -> Response -> Resolution -> Committed, or any live state -> Rejected.
constexpr bool can_transition(ProposalState from, ProposalState to) noexcept {
  if (from == ProposalState::Committed || from == ProposalState::Rejected) return false;
  if (to == ProposalState::Rejected) return true;
  return static_cast<int>(to) == static_cast<int>(from) + 1;
}

/// Identity of a committed proposal; all that verification needs from it.
struct ProposalRef {
  std::uint64_t proposal_id = 0;
  Digest hash;

  /// Stand-in for the proposal that "carried" genesis.
  static ProposalRef genesis() { return {0, aos::hash(std::string_view{})}; }
  bool operator==(const ProposalRef&) const = default;
};

struct Proposal {
  std::uint64_t proposal_id = 0;
  NodeId proposer;
  ledger::Block block;
  Digest parent_proposal_hash;
  Digest hash;
  ProposalState state = ProposalState::Created;

  /// u64 proposal_id | u32 proposer | parent_proposal_hash | u64 index
  /// | block parent_hash | u32 committer | i64 timestamp | tx_root
  ///
  /// The block's own proposal_hash and hash are excluded (they depend on this
  /// hash); transactions are covered through tx_root; state is excluded.
  Bytes canonical_bytes() const {
    const auto& h = block.header;
    ByteWriter w;
    w.u64(proposal_id).u32(proposer.value).raw(parent_proposal_hash.bytes);
    w.u64(h.index.height).raw(h.parent_hash.bytes).u32(h.committer.value).i64(h.timestamp).raw(h.tx_root.bytes);
    return std::move(w).take();
  }
  Digest compute_hash() const { return aos::hash(canonical_bytes()); }
  ProposalRef ref() const { return {proposal_id, hash}; }

  /// The block as it is appended: stamped with this proposal's hash.
  ledger::Block committed_block() const {
    ledger::Block b = block;
    b.stamp_proposal(hash);
    return b;
  }
};

/// Round-robin proposer election: ((height + 1) mod n) + 1.
inline NodeId pce(std::uint32_t n_count, BlockIndex current_height) {
  if (n_count == 0) throw Error(Errc::InvalidNodeCount, "network has no nodes");
  return NodeId{static_cast<std::uint32_t>((current_height.height + 1) % n_count) + 1};
}

/// Replaceable election seam; pce is the shipped policy.
using ElectionFn = std::function<NodeId(std::uint32_t, BlockIndex)>;

inline bool is_my_turn(NodeId self, std::uint32_t n_count, BlockIndex current_height) {
  if (n_count == 0) throw Error(Errc::InvalidNodeCount, "network has no nodes");
  if (self.value < 1 || self.value > n_count)
    throw Error(Errc::NodeOutOfRange, "node " + std::to_string(self.value) + " not in [1, " + std::to_string(n_count) + "]");
  return pce(n_count, current_height) == self;
}

inline Proposal create_proposal(NodeId self, std::uint32_t n_count, const ledger::Block& tip,
                                std::vector<ledger::SealedTransaction> pending_txs, const ProposalRef& last_committed,
                                std::int64_t now) {
  if (!is_my_turn(self, n_count, tip.header.index))
    throw Error(Errc::NotElected, "node " + std::to_string(self.value) + " is not elected at height " +
                                      std::to_string(tip.header.index.height));
  Proposal p;
  p.proposal_id = last_committed.proposal_id + 1;
  p.proposer = self;
  p.block = ledger::produce_block(tip, std::move(pending_txs), self, now);
  p.parent_proposal_hash = last_committed.hash;
  p.hash = p.compute_hash();
  p.state = ProposalState::Created;
  return p;
}

/// Valid next block index.
inline bool vnbi(const Proposal& p, BlockIndex local_height) {
  return p.block.header.index.height == local_height.height + 1;
}

/// Valid proposal hash: the hash recomputes (including tx_root over the
/// carried transactions), the proposal extends the last committed proposal
/// with the next id, and its block extends the local tip.
inline bool vph(const Proposal& p, const ProposalRef& last_committed, const Digest& local_tip_hash) {
  return p.hash == p.compute_hash() && p.block.tx_root_ok() && p.parent_proposal_hash == last_committed.hash &&
         p.proposal_id == last_committed.proposal_id + 1 && p.block.header.parent_hash == local_tip_hash &&
         p.block.header.committer == p.proposer;
}

enum class VerdictReason : std::uint8_t { Ok, BadIndex, BadHash };

constexpr std::string_view to_string(VerdictReason r) noexcept {
  switch (r) {
    case VerdictReason::Ok: return "Ok";
    case VerdictReason::BadIndex: return "BadIndex";
    case VerdictReason::BadHash: return "BadHash";
  }
  return "?";
}

struct Verdict {
  bool accepted = false;
  VerdictReason reason = VerdictReason::BadIndex;

  bool operator==(const Verdict&) const = default;
};

/// PVF from validity predicates: VNBI and VPH.
constexpr bool pvf_conjunctive(bool valid_index, bool valid_hash) noexcept { return valid_index && valid_hash; }

/// PVF from invalidity predicates: not (bad index or bad hash).
constexpr bool pvf_from_invalidity(bool bad_index, bool bad_hash) noexcept { return !(bad_index || bad_hash); }

inline Verdict pvf(const Proposal& p, BlockIndex local_height, const ProposalRef& last_committed,
                   const Digest& local_tip_hash) {
  const bool index_ok = vnbi(p, local_height);
  const bool hash_ok = vph(p, last_committed, local_tip_hash);
  if (pvf_conjunctive(index_ok, hash_ok)) return {true, VerdictReason::Ok};
  return {false, index_ok ? VerdictReason::BadHash : VerdictReason::BadIndex};
}

}  // namespace aos::proposals
