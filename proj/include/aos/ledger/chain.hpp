#pragma once

#include <optional>
#include <vector>

#include "aos/ledger/block.hpp"

namespace aos::ledger {

struct ChainValidation {
  bool valid = true;
  std::optional<std::uint64_t> first_bad_index;

  static ChainValidation ok() { return {}; }
  static ChainValidation bad(std::uint64_t i) { return {false, i}; }
};

/// Checks that `block` may follow `tip`; throws IndexGap, LinkMismatch or
/// HashMismatch.
inline void validate_link(const Block& tip, const Block& block) {
  if (block.header.index.height != tip.header.index.height + 1)
    throw Error(Errc::IndexGap, "expected index " + std::to_string(tip.header.index.height + 1) + ", got " +
                                    std::to_string(block.header.index.height));
  if (block.header.parent_hash != tip.hash) throw Error(Errc::LinkMismatch, "parent hash does not match tip");
  if (!block.tx_root_ok()) throw Error(Errc::HashMismatch, "tx_root does not match transactions");
  if (!block.hash_ok()) throw Error(Errc::HashMismatch, "stored hash does not match header");
}

/// Append-only, hash-linked list of blocks rooted at genesis.
class Chain {
 public:
  Chain() : blocks_{genesis()} {}

  /// Wraps blocks as stored, without checks; use validate_chain on the result.
  static Chain from_blocks(std::vector<Block> blocks) {
    Chain c;
    if (!blocks.empty()) c.blocks_ = std::move(blocks);
    return c;
  }

  BlockIndex height() const noexcept { return blocks_.back().header.index; }
  const Block& tip() const noexcept { return blocks_.back(); }
  const Block& at(std::uint64_t h) const {
    if (h >= blocks_.size()) throw Error(Errc::NotFound, "no block at height " + std::to_string(h));
    return blocks_[h];
  }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::size_t size() const noexcept { return blocks_.size(); }

  void append(Block block) {
    validate_link(tip(), block);
    blocks_.push_back(std::move(block));
  }

 private:
  std::vector<Block> blocks_;
};

/// Full re-hash walk from genesis. Reports the first height whose link,
/// tx_root or hash check fails.
inline ChainValidation validate_chain(const Chain& chain) {
  const auto& bs = chain.blocks();
  if (bs.empty()) return ChainValidation::bad(0);
  const Block& g = bs.front();
  if (g.header.index.height != 0 || g.header.parent_hash != hash(std::string_view{}) || !g.tx_root_ok() || !g.hash_ok())
    return ChainValidation::bad(0);
  for (std::size_t i = 1; i < bs.size(); ++i) {
    const Block& b = bs[i];
    if (b.header.index.height != i || b.header.parent_hash != bs[i - 1].hash || !b.tx_root_ok() || !b.hash_ok())
      return ChainValidation::bad(i);
  }
  return ChainValidation::ok();
}

}  // namespace aos::ledger
