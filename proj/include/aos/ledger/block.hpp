#pragma once

#include <cstdint>
#include <vector>

#include "aos/core.hpp"
#include "aos/transactions/transaction.hpp"

namespace aos::ledger {

using tx::SealedTransaction;

struct BlockHeader {
  BlockIndex index;
  Digest parent_hash;
  Digest proposal_hash;
  NodeId committer;
  std::int64_t timestamp = 0;  // committer-local milliseconds, never checked against a clock
  Digest tx_root;

  /// u64 index | parent_hash | proposal_hash | u32 committer | i64 timestamp | tx_root
  Bytes canonical_bytes() const {
    ByteWriter w;
    w.u64(index.height).raw(parent_hash.bytes).raw(proposal_hash.bytes).u32(committer.value).i64(timestamp).raw(tx_root.bytes);
    return std::move(w).take();
  }

  bool operator==(const BlockHeader&) const = default;
};

/// hash(u32 count | bytes(tx_0) | bytes(tx_1) ...), in block order.
inline Digest compute_tx_root(const std::vector<SealedTransaction>& txs) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(txs.size()));
  for (const auto& t : txs) w.bytes(t.canonical_bytes());
  return hash(w.data());
}

struct Block {
  BlockHeader header;
  std::vector<SealedTransaction> transactions;
  Digest hash;

  Digest recompute_hash() const { return aos::hash(header.canonical_bytes()); }
  bool hash_ok() const { return hash == recompute_hash(); }
  bool tx_root_ok() const { return header.tx_root == compute_tx_root(transactions); }

  /// Binds the block to the proposal that carried it; the block hash changes.
  void stamp_proposal(const Digest& proposal_hash) {
    header.proposal_hash = proposal_hash;
    hash = recompute_hash();
  }

  bool operator==(const Block&) const = default;
};

/// Fixed, proposal-less genesis: identical on every node of every deployment.
inline Block genesis() {
  Block b;
  b.header.index = BlockIndex{0};
  b.header.parent_hash = aos::hash(std::string_view{});
  b.header.proposal_hash = aos::hash(std::string_view{});
  b.header.committer = NodeId{1};
  b.header.timestamp = 0;
  b.header.tx_root = compute_tx_root({});
  b.hash = b.recompute_hash();
  return b;
}

/// Block production: the child of `parent` carrying `txs` in arrival order.
/// proposal_hash stays zero until the carrying proposal commits.
inline Block produce_block(const Block& parent, std::vector<SealedTransaction> txs, NodeId committer,
                           std::int64_t timestamp) {
  Block b;
  b.header.index = parent.header.index.next();
  b.header.parent_hash = parent.hash;
  b.header.committer = committer;
  b.header.timestamp = timestamp;
  b.transactions = std::move(txs);
  b.header.tx_root = compute_tx_root(b.transactions);
  b.hash = b.recompute_hash();
  return b;
}

}  // namespace aos::ledger
