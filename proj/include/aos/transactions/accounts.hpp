#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "aos/transactions/transaction.hpp"
#include "aos/txalgebra/expression.hpp"

namespace aos::tx {

/// Balance movement produced by one successful invocation.
struct StateDelta {
  PublicKey debit;
  PublicKey credit;
  Units amount = 0;

  bool operator==(const StateDelta&) const = default;
};

/// Outcome of applying one committed ledger entry. `status` is "ok",
/// "recorded" (Type A stored for later invocation), "duplicate", or the name
/// of the error that stopped an invocation.
struct Receipt {
  std::uint64_t height = 0;
  Digest tx_id;
  TxType tx_type = TxType::TypeA;
  std::string status;
  StateDelta delta;
};

/// Public-key addressed balances plus the Type A bookkeeping needed for
/// single-consumption. Mutated only from the commit path.
class AccountState {
 public:
  AccountState() = default;
  explicit AccountState(std::map<PublicKey, Units> allocations) : balances_(std::move(allocations)) {}

  Units balance(const PublicKey& pk) const {
    auto it = balances_.find(pk);
    return it == balances_.end() ? 0 : it->second;
  }
  const std::map<PublicKey, Units>& balances() const noexcept { return balances_; }

  Units total_supply() const {
    Units sum = 0;
    for (const auto& [pk, v] : balances_) sum += v;
    return sum;
  }

  bool is_committed(const Digest& id) const { return committed_.contains(id); }
  bool is_consumed(const Digest& id) const { return consumed_.contains(id); }

  /// Marks a Type A id as committed and available for one invocation.
  void record_type_a(const Digest& id) { type_a_.insert(id); }

  /// Evaluates `type_a`'s program under `type_b`'s bindings and moves
  /// value x result units from the Type A sender to its recipient. A zero
  /// result still consumes the Type A.
  StateDelta invoke(const TransactionBody& type_a, const TransactionBody& type_b) {
    if (type_a.tx_type != TxType::TypeA || !type_a.program) throw Error(Errc::Malformed, "target is not a Type A program");
    if (type_b.tx_type != TxType::TypeB || !type_b.target_tx_id) throw Error(Errc::Malformed, "invoker is not Type B");
    const Digest target = type_a.tx_id();
    if (*type_b.target_tx_id != target || !type_a_.contains(target))
      throw Error(Errc::TargetNotFound, type_b.target_tx_id->hex());
    if (consumed_.contains(target)) throw Error(Errc::AlreadyConsumed, target.hex());
    if (type_b.sender != type_a.recipient) throw Error(Errc::KeyMismatch, "only the Type A recipient may invoke it");

    const auto free_vars = txalgebra::variables(*type_a.program);
    for (const auto& [name, bit] : type_b.bindings)
      if (!free_vars.contains(name)) throw Error(Errc::Malformed, "binding for unknown variable " + name);

    const Units gate = txalgebra::evaluate(*type_a.program, type_b.bindings);
    const Units amount = txalgebra::detail::checked_mul(gate, type_a.value);
    if (balance(type_a.sender) < amount) throw Error(Errc::InsufficientFunds, type_a.sender.hex());

    StateDelta d{type_a.sender, type_a.recipient, amount};
    if (amount > 0) {
      balances_[d.debit] -= amount;
      balances_[d.credit] += amount;
    }
    consumed_.insert(target);
    return d;
  }

  /// Commit-path application of one ledger entry. Never throws for
  /// transaction-level failures; they are reported in the receipt.
  Receipt apply(const SealedTransaction& s, std::uint64_t height) {
    Receipt r{height, s.tx_id, s.tx_type, "ok", {}};
    if (!committed_.insert(s.tx_id).second) {
      r.status = "duplicate";
      return r;
    }
    if (s.tx_type == TxType::TypeA) {
      record_type_a(s.tx_id);
      r.status = "recorded";
      return r;
    }
    try {
      if (!s.reveal) throw Error(Errc::Malformed, "invocation without reveal");
      const SignedTransaction& inv = *s.reveal;
      if (!inv.verify()) throw Error(Errc::BadSignature, "invocation signature");
      if (inv.tx_id() != s.tx_id) throw Error(Errc::Malformed, "reveal does not match tx_id");
      if (!inv.body.disclosure) throw Error(Errc::TargetNotFound, "no disclosed target");
      const SignedTransaction& target = *inv.body.disclosure;
      if (!target.verify()) throw Error(Errc::BadSignature, "disclosed target signature");
      r.delta = invoke(target.body, inv.body);
    } catch (const Error& e) {
      r.status = std::string(to_string(e.code()));
    }
    return r;
  }

  std::vector<Receipt> apply_all(const std::vector<SealedTransaction>& txs, std::uint64_t height) {
    std::vector<Receipt> out;
    out.reserve(txs.size());
    for (const auto& s : txs) out.push_back(apply(s, height));
    return out;
  }

 private:
  std::map<PublicKey, Units> balances_;
  std::set<Digest> committed_;
  std::set<Digest> type_a_;
  std::set<Digest> consumed_;
};

inline StateDelta invoke(const TransactionBody& type_a, const TransactionBody& type_b, AccountState& view) {
  return view.invoke(type_a, type_b);
}

}  // namespace aos::tx
