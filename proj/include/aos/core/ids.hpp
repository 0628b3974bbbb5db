#pragma once

#include <compare>
#include <cstdint>
#include <ostream>

namespace aos {

/// 1-based node identifier. Ids within a deployment are sequential, so
/// election can compute a winner from the node count alone.
struct NodeId {
  std::uint32_t value = 1;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  auto operator<=>(const NodeId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, NodeId id) { return os << "node" << id.value; }

/// Block height; the genesis block is height 0.
struct BlockIndex {
  std::uint64_t height = 0;

  constexpr BlockIndex() = default;
  constexpr explicit BlockIndex(std::uint64_t h) : height(h) {}

  constexpr BlockIndex next() const { return BlockIndex{height + 1}; }

  auto operator<=>(const BlockIndex&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, BlockIndex i) { return os << "#" << i.height; }

}  // namespace aos
