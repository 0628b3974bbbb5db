#pragma once

#include <random>
#include <string>

#include "aos/ledger.hpp"
#include "aos/transactions.hpp"
#include "aos/txalgebra.hpp"

namespace fixtures {

inline const aos::KeyPair& key(int i) {
  static const std::vector<aos::KeyPair> keys = [] {
    std::vector<aos::KeyPair> v;
    for (int k = 0; k < 8; ++k) v.push_back(aos::generate_keypair("fixture key seed #" + std::to_string(k)));
    return v;
  }();
  return keys.at(static_cast<std::size_t>(i));
}

template <typename Rng>
aos::tx::SealedTransaction random_tx(Rng& rng) {
  const auto& from = key(static_cast<int>(rng() % 8));
  const auto& to = key(static_cast<int>(rng() % 8));
  auto body = aos::tx::make_type_a(from.public_key, to.public_key, aos::txalgebra::parse("A & B"), rng() % 1000);
  return aos::tx::seal(aos::tx::sign(body, from.private_key), to.public_key);
}

/// Genesis plus `blocks` blocks holding 0-3 random sealed transactions each.
template <typename Rng>
aos::ledger::Chain random_chain(Rng& rng, int blocks) {
  aos::ledger::Chain c;
  for (int i = 0; i < blocks; ++i) {
    std::vector<aos::tx::SealedTransaction> txs;
    for (auto k = rng() % 4; k > 0; --k) txs.push_back(random_tx(rng));
    c.append(aos::ledger::produce_block(c.tip(), std::move(txs), aos::NodeId{static_cast<std::uint32_t>(1 + rng() % 4)},
                                        static_cast<std::int64_t>(1000 + i)));
  }
  return c;
}

template <std::size_t N, typename Rng>
void flip(std::array<std::uint8_t, N>& a, Rng& rng) {
  a[rng() % N] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
}

/// Flips one random bit in one random field of one random block.
template <typename Rng>
std::vector<aos::ledger::Block> flip_one_bit(std::vector<aos::ledger::Block> blocks, Rng& rng) {
  auto& b = blocks[rng() % blocks.size()];
  const bool has_tx = !b.transactions.empty();
  switch (rng() % (has_tx ? 8 : 7)) {
    case 0: b.header.index.height ^= std::uint64_t{1} << (rng() % 64); break;
    case 1: flip(b.header.parent_hash.bytes, rng); break;
    case 2: flip(b.header.proposal_hash.bytes, rng); break;
    case 3: b.header.committer.value ^= 1u << (rng() % 32); break;
    case 4: b.header.timestamp ^= std::int64_t{1} << (rng() % 63); break;
    case 5: flip(b.header.tx_root.bytes, rng); break;
    case 6: flip(b.hash.bytes, rng); break;
    default: {
      auto& t = b.transactions[rng() % b.transactions.size()];
      t.ciphertext[rng() % t.ciphertext.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
    }
  }
  return blocks;
}

}  // namespace fixtures
