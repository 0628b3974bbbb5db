#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "aos/agreement/message.hpp"
#include "aos/ledger/chain.hpp"
#include "aos/proposals.hpp"
#include "aos/transactions/accounts.hpp"

namespace aos::agreement {

using proposals::Proposal;
using proposals::ProposalRef;
using proposals::ProposalState;

/// What the replica needs from a chain: the tip and an append that either
/// persists the block or throws.
template <typename L>
concept LedgerStore = requires(L l, const L cl, ledger::Block b) {
  { cl.height() } -> std::same_as<BlockIndex>;
  { cl.tip() } -> std::convertible_to<const ledger::Block&>;
  l.append(std::move(b));
};

/// `to` empty means every peer except the sender.
struct Outbound {
  std::optional<NodeId> to;
  AgreementMessage message;
};

enum class Disposition : std::uint8_t { Responded, Recorded, Buffered, Committed, Dropped };

constexpr std::string_view to_string(Disposition d) noexcept {
  switch (d) {
    case Disposition::Responded: return "responded";
    case Disposition::Recorded: return "recorded";
    case Disposition::Buffered: return "buffered";
    case Disposition::Committed: return "committed";
    case Disposition::Dropped: return "dropped";
  }
  return "?";
}

/// Everything a handler produced. Handlers never touch the network; the
/// caller delivers `outbound`.
struct Effects {
  std::vector<Outbound> outbound;
  Disposition disposition = Disposition::Recorded;
  std::string reason;
  std::vector<ledger::Block> committed;
  std::vector<tx::Receipt> receipts;
  bool timed_out = false;
  bool proposed = false;

  void absorb(Effects&& o) {
    for (auto& m : o.outbound) outbound.push_back(std::move(m));
    for (auto& b : o.committed) committed.push_back(std::move(b));
    for (auto& r : o.receipts) receipts.push_back(std::move(r));
    timed_out = timed_out || o.timed_out;
    proposed = proposed || o.proposed;
  }
};

/// Votes seen for one proposal hash at the current height.
struct Tally {
  std::optional<Proposal> payload;
  std::map<NodeId, bool> responses;
  std::set<NodeId> resolutions;
  std::vector<AgreementMessage> resolution_msgs;

  std::size_t accepts() const {
    return static_cast<std::size_t>(std::count_if(responses.begin(), responses.end(), [](auto& kv) { return kv.second; }));
  }
  std::size_t rejects() const { return responses.size() - accepts(); }
};

/// Agreement state for the next height. Votes, the lock (`proposal`) and
/// the messages this node sent survive timeouts; phase, replay suppression
/// and the deadline are per arm.
struct RoundState {
  std::uint64_t height = 0;
  std::optional<Proposal> proposal;
  std::map<Digest, Tally> tallies;
  ProposalState phase = ProposalState::Created;
  std::int64_t deadline = 0;
  std::uint32_t arm = 0;
  std::set<Digest> responded;
  bool resolution_sent = false;
  std::vector<AgreementMessage> sent;
  std::vector<ProposalState> phases{ProposalState::Created};
};

struct ReplicaOptions {
  bool auto_propose = true;
  std::int64_t propose_delay = 0;
  std::size_t max_block_txs = 256;
  std::size_t max_pool = 10000;
  std::uint64_t future_window = 16;
  std::size_t max_buffered = 4096;
  /// Commit certificates kept for peers that fall behind.
  std::size_t kept_certificates = 64;
  proposals::ElectionFn elect = proposals::pce;
  /// Rewrites the pool selection before it goes into a proposal (decoys).
  std::function<std::vector<ledger::SealedTransaction>(std::vector<ledger::SealedTransaction>)> prepare_txs;
};

template <LedgerStore Ledger = ledger::Chain>
class Replica {
 public:
  using CommitHook = std::function<void(const ledger::Block&, const std::vector<tx::Receipt>&)>;

  Replica(NodeId self, NetworkConfig cfg, KeyPair keys, std::vector<PublicKey> registry, Ledger chain,
          tx::AccountState accounts = {}, ReplicaOptions opts = {})
      : self_(self),
        cfg_(cfg),
        keys_(std::move(keys)),
        registry_(std::move(registry)),
        ledger_(std::move(chain)),
        accounts_(std::move(accounts)),
        opts_(std::move(opts)) {
    if (registry_.size() != cfg_.n) throw Error(Errc::InvalidNodeCount, "registry size differs from n");
    if (self_.value < 1 || self_.value > cfg_.n) throw Error(Errc::NodeOutOfRange, "self not in registry");
    if (registry_[self_.value - 1] != keys_.public_key) throw Error(Errc::PeerKeyMismatch, "own key not in registry");
    const auto& tip = ledger_.tip();
    last_committed_ = tip.header.index.height == 0 ? ProposalRef::genesis()
                                                   : ProposalRef{tip.header.index.height, tip.header.proposal_hash};
    round_.height = ledger_.height().height + 1;
  }

  void set_commit_hook(CommitHook hook) { hook_ = std::move(hook); }
  void set_auto_propose(bool on) { opts_.auto_propose = on; }

  /// Arms the first round. Implied by the first tick or message.
  void start(std::int64_t now) {
    if (started_) return;
    started_ = true;
    round_.deadline = now + cfg_.round_timeout;
    round_start_ = now;
  }

  Effects handle(const AgreementMessage& m, std::int64_t now) {
    start(now);
    if (m.sender.value < 1 || m.sender.value > cfg_.n) return dropped("UnknownSender");
    if (m.sender == self_) return dropped("SelfMessage");
    if (!m.verify(registry_[m.sender.value - 1])) return dropped("BadSignature");
    Effects e = dispatch(m, now);
    drain_future(now, e);
    return e;
  }

  /// Proposes when elected and fires the round timeout.
  Effects tick(std::int64_t now) {
    start(now);
    Effects e;
    if (opts_.auto_propose && !round_.proposal && elected() == self_ && now >= round_start_ + opts_.propose_delay)
      propose(now, e);
    if (now >= round_.deadline) e.absorb(on_timeout(now));
    drain_future(now, e);
    return e;
  }

  /// Pre-prepare: validate, respond to everyone, lock on acceptance.
  Effects on_created(const AgreementMessage& m, std::int64_t now) {
    Effects e;
    e.disposition = Disposition::Responded;
    const Digest& h = m.proposal_hash;
    if (!m.payload || m.payload->hash != h || m.payload->block.header.index.height != m.height ||
        m.payload->proposer != m.sender)
      return dropped("Malformed");
    if (m.sender != elected()) {
      e.reason = "WrongProposer";
      broadcast(e, make_vote(MessageKind::ProposalResponse, m.height, h, self_, false, keys_.private_key));
      return e;
    }
    if (round_.responded.contains(h)) return dropped("Duplicate");
    if (round_.proposal && round_.proposal->hash != h) return dropped("ConflictingProposal");

    Tally& t = round_.tallies[h];
    if (!t.payload) t.payload = *m.payload;
    t.responses.try_emplace(m.sender, true);
    const auto verdict = proposals::pvf(*m.payload, ledger_.height(), last_committed_, ledger_.tip().hash);
    round_.responded.insert(h);
    if (verdict.accepted && !round_.proposal) {
      round_.proposal = *m.payload;
      round_.proposal->state = ProposalState::Response;
    }
    t.responses.try_emplace(self_, verdict.accepted);
    e.reason = std::string(proposals::to_string(verdict.reason));
    send_vote(e, make_vote(MessageKind::ProposalResponse, m.height, h, self_, verdict.accepted, keys_.private_key));
    set_phase(ProposalState::Response);
    evaluate(h, now, e);
    return e;
  }

  /// Prepare: count votes; resolve on quorum, give up when quorum is out of reach.
  Effects on_response(const AgreementMessage& m, std::int64_t now) {
    Effects e;
    Tally& t = round_.tallies[m.proposal_hash];
    if (!t.responses.try_emplace(m.sender, m.accept).second) return dropped("DuplicateVote");
    e.reason = round_.proposal && round_.proposal->hash == m.proposal_hash ? "Counted" : "UnknownProposal";
    evaluate(m.proposal_hash, now, e);
    return e;
  }

  /// Commit: append exactly once when resolutions reach quorum. Resolutions
  /// carry the proposal, so a node that never saw (or did not lock) the
  /// winning Created can still commit from the certificate.
  Effects on_resolution(const AgreementMessage& m, std::int64_t now) {
    Effects e;
    if (m.payload && (m.payload->hash != m.proposal_hash || m.payload->block.header.index.height != m.height))
      return dropped("Malformed");
    Tally& t = round_.tallies[m.proposal_hash];
    if (!t.resolutions.insert(m.sender).second) return dropped("DuplicateVote");
    t.resolution_msgs.push_back(m);
    if (!t.payload && m.payload) t.payload = *m.payload;
    e.reason = round_.proposal && round_.proposal->hash == m.proposal_hash ? "Counted" : "UnknownProposal";
    evaluate(m.proposal_hash, now, e);
    return e;
  }

  /// Marks the arm dead without touching the height; the same proposer stays
  /// elected. Everything this node sent at the height is sent again so lost
  /// messages do not stall the round; a node that sent nothing yet announces
  /// itself with a reject vote for no proposal, which peers that are ahead
  /// answer with their commit certificate.
  Effects on_timeout(std::int64_t now) {
    Effects e;
    e.timed_out = true;
    e.reason = "RoundTimeout";
    set_phase(ProposalState::Rejected);
    ++round_.arm;
    round_.phase = ProposalState::Created;
    round_.phases = {ProposalState::Created};
    round_.responded.clear();
    round_.deadline = now + cfg_.round_timeout;
    if (round_.sent.empty()) {
      send_vote(e, make_vote(MessageKind::ProposalResponse, round_.height, Digest{}, self_, false, keys_.private_key));
    } else {
      for (const auto& m : round_.sent) broadcast(e, m);
    }
    if (round_.proposal) {
      if (round_.proposal->proposer == self_) round_.responded.insert(round_.proposal->hash);
      set_phase(ProposalState::Response);
      if (round_.resolution_sent) set_phase(ProposalState::Resolution);
      evaluate(round_.proposal->hash, now, e);
    }
    return e;
  }

  /// Queues a transaction for this node's next proposal. Idempotent by tx_id.
  Digest submit(ledger::SealedTransaction s) {
    const Digest id = s.tx_id;
    if (pool_ids_.contains(id) || accounts_.is_committed(id)) return id;
    if (pool_.size() >= opts_.max_pool) throw Error(Errc::QueueFull, "transaction pool is full");
    pool_ids_.insert(id);
    pool_.push_back(std::move(s));
    return id;
  }

  NodeId self() const noexcept { return self_; }
  const NetworkConfig& config() const noexcept { return cfg_; }
  const KeyPair& keys() const noexcept { return keys_; }
  BlockIndex height() const { return ledger_.height(); }
  const Ledger& ledger() const noexcept { return ledger_; }
  const ledger::Block& tip() const { return ledger_.tip(); }
  const ProposalRef& last_committed() const noexcept { return last_committed_; }
  const RoundState& round() const noexcept { return round_; }
  const tx::AccountState& accounts() const noexcept { return accounts_; }
  std::size_t pool_size() const noexcept { return pool_.size(); }
  NodeId elected() const { return opts_.elect(cfg_.n, ledger_.height()); }
  /// Appends performed by this replica; one per height.
  std::uint64_t appends() const noexcept { return appends_; }

 private:
  static Effects dropped(std::string reason) {
    Effects e;
    e.disposition = Disposition::Dropped;
    e.reason = std::move(reason);
    return e;
  }

  Effects dispatch(const AgreementMessage& m, std::int64_t now) {
    const std::uint64_t next = ledger_.height().height + 1;
    if (m.height < next) return on_stale(m);
    if (m.height > next) {
      if (m.height - next > opts_.future_window || buffered_ >= opts_.max_buffered) return dropped("FutureHeight");
      future_[m.height].push_back(m);
      ++buffered_;
      Effects e;
      e.disposition = Disposition::Buffered;
      e.reason = "FutureHeight";
      return e;
    }
    switch (m.kind) {
      case MessageKind::ProposalCreated: return on_created(m, now);
      case MessageKind::ProposalResponse: return on_response(m, now);
      case MessageKind::ProposalResolution: return on_resolution(m, now);
    }
    return dropped("UnknownKind");
  }

  /// A peer is still working on a height this node already committed: hand
  /// it the certificate. Stale resolutions are never answered, so two
  /// lagging nodes cannot ping-pong.
  Effects on_stale(const AgreementMessage& m) {
    auto it = certificates_.find(m.height);
    if (m.kind == MessageKind::ProposalResolution || it == certificates_.end()) return dropped("StaleHeight");
    Effects e;
    e.disposition = Disposition::Responded;
    e.reason = "StaleHeight";
    for (const auto& r : it->second) e.outbound.push_back(Outbound{m.sender, r});
    return e;
  }

  void drain_future(std::int64_t now, Effects& e) {
    while (!future_.empty()) {
      auto it = future_.begin();
      const std::uint64_t next = ledger_.height().height + 1;
      if (it->first > next) break;
      auto batch = std::move(it->second);
      future_.erase(it);
      buffered_ -= batch.size();
      if (batch.empty() || batch.front().height < next) continue;
      for (const auto& m : batch) {
        if (m.height != ledger_.height().height + 1) continue;
        Effects sub = dispatch(m, now);
        e.absorb(std::move(sub));
      }
    }
  }

  void broadcast(Effects& e, AgreementMessage m) { e.outbound.push_back(Outbound{std::nullopt, std::move(m)}); }

  void send_vote(Effects& e, AgreementMessage m) {
    round_.sent.push_back(m);
    broadcast(e, std::move(m));
  }

  void set_phase(ProposalState p) {
    if (round_.phase == p) return;
    if (!proposals::can_transition(round_.phase, p)) return;
    round_.phase = p;
    round_.phases.push_back(p);
  }

  void propose(std::int64_t now, Effects& e) {
    std::vector<ledger::SealedTransaction> txs;
    for (const auto& s : pool_) {
      if (txs.size() >= opts_.max_block_txs) break;
      txs.push_back(s);
    }
    if (opts_.prepare_txs) txs = opts_.prepare_txs(std::move(txs));
    Proposal p = proposals::create_proposal(self_, cfg_.n, ledger_.tip(), std::move(txs), last_committed_, now);
    p.state = ProposalState::Response;
    const Digest h = p.hash;
    Tally& t = round_.tallies[h];
    t.payload = p;
    t.responses.try_emplace(self_, true);
    round_.proposal = p;
    round_.responded.insert(h);
    send_vote(e, make_created(p, self_, keys_.private_key));
    e.proposed = true;
    set_phase(ProposalState::Response);
    evaluate(h, now, e);
  }

  void evaluate(const Digest& h, std::int64_t now, Effects& e) {
    Tally& t = round_.tallies[h];
    const bool locked_here = round_.proposal && round_.proposal->hash == h;
    if (locked_here && round_.phase == ProposalState::Response && !round_.resolution_sent &&
        t.accepts() >= cfg_.response_quorum) {
      round_.resolution_sent = true;
      round_.proposal->state = ProposalState::Resolution;
      AgreementMessage r = make_vote(MessageKind::ProposalResolution, round_.height, h, self_, true, keys_.private_key);
      r.payload = *round_.proposal;
      t.resolutions.insert(self_);
      t.resolution_msgs.push_back(r);
      send_vote(e, std::move(r));
      set_phase(ProposalState::Resolution);
    }
    if (locked_here && round_.phase == ProposalState::Response && t.rejects() > cfg_.n - cfg_.response_quorum)
      set_phase(ProposalState::Rejected);
    if (t.resolutions.size() >= cfg_.resolution_quorum && t.payload) {
      // Honest nodes resolve only the hash they locked, and lock once per
      // height, so two certificates cannot exist for one height.
      const auto verdict = proposals::pvf(*t.payload, ledger_.height(), last_committed_, ledger_.tip().hash);
      if (verdict.accepted) commit(*t.payload, t.resolution_msgs, now, e);
    }
  }

  void commit(Proposal p, std::vector<AgreementMessage> certificate, std::int64_t now, Effects& e) {
    p.state = ProposalState::Committed;
    ledger::Block block = p.committed_block();
    try {
      ledger_.append(block);
    } catch (const Error& err) {
      throw Error(Errc::LocalInconsistency, err.what());
    }
    ++appends_;
    last_committed_ = p.ref();
    auto receipts = accounts_.apply_all(block.transactions, block.header.index.height);
    for (const auto& t : block.transactions) {
      if (pool_ids_.erase(t.tx_id))
        pool_.erase(std::remove_if(pool_.begin(), pool_.end(), [&](auto& s) { return s.tx_id == t.tx_id; }), pool_.end());
    }
    if (round_.proposal && round_.proposal->hash == p.hash) set_phase(ProposalState::Committed);
    if (hook_) hook_(block, receipts);
    e.disposition = Disposition::Committed;
    e.committed.push_back(block);
    for (auto& r : receipts) e.receipts.push_back(std::move(r));

    // One carrier of the payload is enough for a peer to commit.
    for (std::size_t i = 1; i < certificate.size(); ++i) certificate[i].payload.reset();
    if (!certificate.empty()) certificate.front().payload = p;
    certificates_[block.header.index.height] = std::move(certificate);
    while (certificates_.size() > opts_.kept_certificates) certificates_.erase(certificates_.begin());

    round_ = RoundState{};
    round_.height = ledger_.height().height + 1;
    round_.deadline = now + cfg_.round_timeout;
    round_start_ = now;
  }

  NodeId self_;
  NetworkConfig cfg_;
  KeyPair keys_;
  std::vector<PublicKey> registry_;
  Ledger ledger_;
  tx::AccountState accounts_;
  ReplicaOptions opts_;
  CommitHook hook_;

  ProposalRef last_committed_;
  RoundState round_;
  bool started_ = false;
  std::int64_t round_start_ = 0;
  std::uint64_t appends_ = 0;

  std::map<std::uint64_t, std::vector<AgreementMessage>> future_;
  std::map<std::uint64_t, std::vector<AgreementMessage>> certificates_;
  std::size_t buffered_ = 0;
  std::deque<ledger::SealedTransaction> pool_;
  std::unordered_set<Digest> pool_ids_;
};

}  // namespace aos::agreement
