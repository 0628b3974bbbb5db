#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "aos/core/crypto.hpp"
#include "aos/transactions/envelope.hpp"

namespace aos::privacy {

/// Randomized response with flip probability 1/(1+e^epsilon).
/// epsilon = +inf is accepted and never flips.
struct DPConfig {
  double epsilon = std::log(3.0);

  static DPConfig with_epsilon(double eps) {
    if (!(eps > 0.0)) throw Error(Errc::InvalidEpsilon, "epsilon must be positive");
    return DPConfig{eps};
  }
};

inline double flip_probability(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidEpsilon, "epsilon must be positive");
  if (std::isinf(epsilon)) return 0.0;
  return 1.0 / (1.0 + std::exp(epsilon));
}

inline double flip_probability(const DPConfig& cfg) { return flip_probability(cfg.epsilon); }

template <typename Rng>
bool dp_randomize(bool bit, const DPConfig& cfg, Rng& rng) {
  std::bernoulli_distribution flip(flip_probability(cfg));
  return flip(rng) ? !bit : bit;
}

/// Structurally valid, value-zero Type A between two throwaway keys derived
/// from the rng, sealed to the second one.
template <typename Rng>
tx::SealedTransaction make_decoy(Rng& rng) {
  auto draw_key = [&] {
    Bytes seed(32);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : seed) b = static_cast<std::uint8_t>(byte(rng));
    return generate_keypair(ByteView(seed));
  };
  const KeyPair from = draw_key();
  const KeyPair to = draw_key();
  auto body = tx::make_type_a(from.public_key, to.public_key, txalgebra::Expr::var("d"), 0);
  return tx::seal(tx::sign(body, from.private_key), to.public_key);
}

/// Number of decoys for a batch: one Bernoulli(flip probability) trial per
/// real transaction plus one for the batch itself, so empty batches are not
/// distinguishable by size alone.
template <typename Rng>
std::size_t decoy_count(std::size_t real_count, const DPConfig& cfg, Rng& rng) {
  std::bernoulli_distribution add(flip_probability(cfg));
  std::size_t n = 0;
  for (std::size_t i = 0; i <= real_count; ++i) n += add(rng) ? 1 : 0;
  return n;
}

/// Mixes decoys into `txs` at rng-chosen positions.
template <typename Rng>
std::vector<tx::SealedTransaction> inject_decoys(std::vector<tx::SealedTransaction> txs, const DPConfig& cfg, Rng& rng) {
  const std::size_t n = decoy_count(txs.size(), cfg, rng);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pos(0, txs.size());
    const auto at = static_cast<std::ptrdiff_t>(pos(rng));
    txs.insert(txs.begin() + at, make_decoy(rng));
  }
  return txs;
}

}  // namespace aos::privacy
