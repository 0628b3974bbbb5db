#pragma once

// Reference implementations that share no code with the library. Tests
// compare library output against these.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------- algebra

/// An expression as text plus its truth table. Bit i of `table` is the value
/// under binding i, where variable k takes bit k of i.
struct TableExpr {
  std::string text;
  std::uint32_t table;
};

inline std::uint32_t var_table(int k, int nvars) {
  std::uint32_t t = 0;
  for (int i = 0; i < (1 << nvars); ++i)
    if ((i >> k) & 1) t |= 1u << i;
  return t;
}

inline std::uint32_t full_mask(int nvars) { return nvars >= 5 ? 0xffffffffu : (1u << (1 << nvars)) - 1; }

inline std::string var_name(int k) { return std::string(1, static_cast<char>('A' + k)); }

/// Every expression of depth <= `depth` over `nvars` variables (plus the
/// constants 0 and 1 when `consts`), built from !, & and |. Depth 0 is a
/// leaf.
inline std::vector<TableExpr> enumerate(int depth, int nvars, bool consts) {
  const std::uint32_t mask = full_mask(nvars);
  std::vector<TableExpr> level;
  for (int k = 0; k < nvars; ++k) level.push_back({var_name(k), var_table(k, nvars)});
  if (consts) {
    level.push_back({"0", 0});
    level.push_back({"1", mask});
  }
  for (int d = 1; d <= depth; ++d) {
    std::vector<TableExpr> next = level;
    for (const auto& a : level) next.push_back({"!(" + a.text + ")", ~a.table & mask});
    for (const auto& a : level)
      for (const auto& b : level) {
        next.push_back({"(" + a.text + " & " + b.text + ")", a.table & b.table});
        next.push_back({"(" + a.text + " | " + b.text + ")", a.table | b.table});
      }
    level = std::move(next);
  }
  return level;
}

/// Random expression of exactly depth `depth` (the root is an operator when
/// depth > 0).
template <typename Rng>
TableExpr random_expr(int depth, int nvars, Rng& rng) {
  const std::uint32_t mask = full_mask(nvars);
  if (depth == 0) {
    std::uniform_int_distribution<int> leaf(0, nvars + 1);
    const int k = leaf(rng);
    if (k < nvars) return {var_name(k), var_table(k, nvars)};
    return k == nvars ? TableExpr{"0", 0} : TableExpr{"1", mask};
  }
  std::uniform_int_distribution<int> op(0, 2);
  std::uniform_int_distribution<int> sub(0, depth - 1);
  switch (op(rng)) {
    case 0: {
      auto a = random_expr(depth - 1, nvars, rng);
      return {"!(" + a.text + ")", ~a.table & mask};
    }
    case 1: {
      auto a = random_expr(depth - 1, nvars, rng);
      auto b = random_expr(sub(rng), nvars, rng);
      return {"(" + a.text + " & " + b.text + ")", a.table & b.table};
    }
    default: {
      auto a = random_expr(sub(rng), nvars, rng);
      auto b = random_expr(depth - 1, nvars, rng);
      return {"(" + a.text + " | " + b.text + ")", a.table | b.table};
    }
  }
}

// --------------------------------------------------------------- election

/// argmax by full sort; ties to the smallest id. No winner unless every
/// confirmation is set.
inline std::optional<std::uint64_t> election_winner(const std::vector<std::pair<std::uint64_t, std::vector<int>>>& ballots,
                                                    const std::vector<bool>& confirmed) {
  if (ballots.empty()) return std::nullopt;
  for (bool c : confirmed)
    if (!c) return std::nullopt;
  std::vector<std::pair<long, std::uint64_t>> scored;
  for (const auto& [id, votes] : ballots) scored.push_back({-static_cast<long>(std::count(votes.begin(), votes.end(), 1)), id});
  std::sort(scored.begin(), scored.end());
  return scored.front().second;
}

// ------------------------------------------------------------- mechanisms

/// Intersection of a1 + (a2 - a1) x and b1 + (b2 - b1) x.
inline double linear_crossing(double a1, double a2, double b1, double b2) {
  return (a1 - b1) / ((a1 - a2) + (b2 - b1));
}

// ---------------------------------------------------------------- pedersen

/// g^s h^t mod p by repeated multiplication.
inline std::uint64_t naive_commit(std::uint64_t p, std::uint64_t g, std::uint64_t h, std::uint64_t s, std::uint64_t t) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < s; ++i) r = r * g % p;
  for (std::uint64_t i = 0; i < t; ++i) r = r * h % p;
  return r;
}

// --------------------------------------------------------------------- dp

inline double flip_probability(double eps) { return 1.0 / (1.0 + std::exp(eps)); }

}  // namespace oracle
