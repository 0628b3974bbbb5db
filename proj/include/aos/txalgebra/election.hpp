#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aos/txalgebra/expression.hpp"

namespace aos::txalgebra {

using BallotId = std::uint64_t;

/// Ballots, their {0,1} votes and per-ballot confirmation bits.
class Election {
 public:
  Election() = default;
  explicit Election(std::set<BallotId> ballots) : ballots_(std::move(ballots)) {}

  void add_ballot(BallotId b) { ballots_.insert(b); }

  /// Records one vote for `b`; the vote set for a ballot only ever grows.
  void add_vote(BallotId b, int vote) {
    require_ballot(b);
    if (vote != 0 && vote != 1) throw Error(Errc::InvalidVote, "vote must be 0 or 1");
    votes_[b].push_back(static_cast<std::uint8_t>(vote));
  }

  void set_votes(BallotId b, const std::vector<int>& votes) {
    require_ballot(b);
    auto& cell = votes_[b];
    cell.clear();
    for (int v : votes) add_vote(b, v);
  }

  void confirm(BallotId b, bool confirmed) {
    require_ballot(b);
    confirmations_[b] = confirmed;
  }

  const std::set<BallotId>& ballots() const noexcept { return ballots_; }

  std::uint64_t tally(BallotId b) const {
    require_ballot(b);
    auto it = votes_.find(b);
    if (it == votes_.end()) return 0;
    std::uint64_t sum = 0;
    for (auto v : it->second) sum += v;
    return sum;
  }

  /// Every candidate's confirmation as one conjunction c_b1 & c_b2 & ...
  /// An unconfirmed ballot binds to 0.
  Expr confirmation_circuit() const {
    std::optional<Expr> acc;
    for (BallotId b : ballots_) {
      Expr v = Expr::var(confirmation_var(b));
      acc = acc ? Expr::conj(*acc, v) : v;
    }
    return acc ? *acc : Expr::constant(true);
  }

  Binding confirmation_binding() const {
    Binding bind;
    for (BallotId b : ballots_) {
      auto it = confirmations_.find(b);
      bind[confirmation_var(b)] = it != confirmations_.end() && it->second;
    }
    return bind;
  }

  /// argmax of the tallies, gated on every candidate confirming the result.
  /// Ties go to the smallest ballot id.
  std::optional<BallotId> winner() const {
    if (ballots_.empty()) return std::nullopt;
    if (evaluate(confirmation_circuit(), confirmation_binding()) == 0) return std::nullopt;
    std::optional<BallotId> best;
    std::uint64_t best_count = 0;
    for (BallotId b : ballots_) {
      const auto t = tally(b);
      if (!best || t > best_count) {
        best = b;
        best_count = t;
      }
    }
    return best;
  }

 private:
  static std::string confirmation_var(BallotId b) { return "c" + std::to_string(b); }

  void require_ballot(BallotId b) const {
    if (!ballots_.contains(b)) throw Error(Errc::UnknownBallot, std::to_string(b));
  }

  std::set<BallotId> ballots_;
  std::map<BallotId, std::vector<std::uint8_t>> votes_;
  std::map<BallotId, bool> confirmations_;
};

}  // namespace aos::txalgebra
