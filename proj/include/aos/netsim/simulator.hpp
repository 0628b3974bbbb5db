#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aos/agreement/replica.hpp"
#include "aos/netsim/byzantine.hpp"
#include "aos/netsim/config.hpp"

namespace aos::netsim {

using agreement::Disposition;
using agreement::Effects;
using agreement::Replica;

enum class EventKind : std::uint8_t { Deliver, Drop, Timeout, Commit };

constexpr std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::Deliver: return "deliver";
    case EventKind::Drop: return "drop";
    case EventKind::Timeout: return "timeout";
    case EventKind::Commit: return "commit";
  }
  return "?";
}

/// One line of the trace. `from`/`to` are 0 when not applicable; message
/// fields are empty for timeouts. Commits carry the block hash.
struct SimEvent {
  std::uint64_t tick = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Deliver;
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::optional<MessageKind> message;
  std::uint64_t height = 0;
  Digest hash;
  bool accept = false;
  std::string detail;
};

inline nlohmann::json to_json_value(const SimEvent& e) {
  nlohmann::json j{{"tick", e.tick}, {"seq", e.seq}, {"kind", std::string(to_string(e.kind))},
                   {"from", e.from}, {"to", e.to},   {"height", e.height},
                   {"hash", e.hash.hex()}, {"detail", e.detail}};
  if (e.message) {
    j["message"] = std::string(agreement::to_string(*e.message));
    j["accept"] = e.accept;
  }
  return j;
}

struct Conflict {
  std::uint64_t height = 0;
  std::uint32_t node_a = 0;
  std::uint32_t node_b = 0;
  Digest hash_a;
  Digest hash_b;
};

struct MessageCounts {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_network = 0;
  std::uint64_t dropped_by_node = 0;
  std::uint64_t created = 0;
  std::uint64_t responses = 0;
  std::uint64_t resolutions = 0;
};

struct SimReport {
  SimConfig config;
  std::uint64_t ticks = 0;
  /// Final height per node id (index id-1); crashed nodes stay at 0.
  std::vector<std::uint64_t> heights;
  /// height -> node id -> committed block hash.
  std::map<std::uint64_t, std::map<std::uint32_t, Digest>> commits;
  /// height -> committer recorded in the block, from the first honest chain.
  std::map<std::uint64_t, std::uint32_t> committers;
  std::vector<Conflict> conflicts;
  MessageCounts messages;
  /// Fewest distinct accept votes (proposer included) behind any honest commit.
  std::size_t min_accepts_per_commit = 0;
  /// Every replica appended exactly once per height it holds.
  bool appends_once = true;
  /// False when the run violated a per-arm phase-order check.
  bool phases_monotone = true;
  std::vector<SimEvent> trace;

  bool safety_ok() const { return conflicts.empty(); }
  /// Safety is only claimed when Byzantine nodes are within f.
  bool safety_asserted() const { return config.byzantine_count() <= (config.n - 1) / 3; }
  std::string safety_label() const {
    if (!safety_asserted()) return "safety-only-unknown";
    return safety_ok() ? "safe" : "violated";
  }

  std::uint64_t min_honest_height() const {
    std::optional<std::uint64_t> m;
    for (std::uint32_t id = 1; id <= config.n; ++id)
      if (config.fault_of(id) == FaultModel::Honest) m = std::min(m.value_or(heights[id - 1]), heights[id - 1]);
    return m.value_or(0);
  }

  void write_trace(std::ostream& os) const {
    for (const auto& e : trace) os << to_json_value(e).dump() << '\n';
  }

  nlohmann::json summary() const {
    nlohmann::json commits_j = nlohmann::json::object();
    for (const auto& [h, per_node] : commits) {
      nlohmann::json row = nlohmann::json::object();
      for (const auto& [id, d] : per_node) row[std::to_string(id)] = d.hex();
      commits_j[std::to_string(h)] = row;
    }
    nlohmann::json conflicts_j = nlohmann::json::array();
    for (const auto& c : conflicts)
      conflicts_j.push_back({{"height", c.height}, {"nodes", {c.node_a, c.node_b}}, {"hashes", {c.hash_a.hex(), c.hash_b.hex()}}});
    return {{"seed", config.seed},
            {"n", config.n},
            {"ticks", ticks},
            {"heights", heights},
            {"safety", safety_label()},
            {"conflicts", conflicts_j},
            {"messages",
             {{"sent", messages.sent},
              {"delivered", messages.delivered},
              {"dropped_network", messages.dropped_network},
              {"dropped_by_node", messages.dropped_by_node},
              {"created", messages.created},
              {"responses", messages.responses},
              {"resolutions", messages.resolutions}}},
            {"commits", commits_j}};
  }
};

/// Single-threaded discrete-tick network. Messages are delivered in
/// (tick, seq) order; every random choice comes from one seeded engine.
class Simulator {
 public:
  explicit Simulator(SimConfig cfg) : cfg_(std::move(cfg)), net_(NetworkConfig::for_nodes(cfg_.n, cfg_.round_timeout)), rng_(cfg_.seed) {
    cfg_.validate();
    report_.config = cfg_;
    std::vector<PublicKey> registry;
    for (std::uint32_t id = 1; id <= cfg_.n; ++id) {
      keys_.push_back(generate_keypair("aos-sim/" + std::to_string(cfg_.seed) + "/node/" + std::to_string(id)));
      registry.push_back(keys_.back().public_key);
    }
    for (std::uint32_t id = 1; id <= cfg_.n; ++id) {
      const FaultModel f = cfg_.fault_of(id);
      if (f == FaultModel::Equivocator) {
        equivocators_.emplace(id, Equivocator(NodeId{id}, net_, keys_[id - 1]));
      } else if (f != FaultModel::Crashed) {
        replicas_.emplace(id, std::make_unique<Replica<>>(NodeId{id}, net_, keys_[id - 1], registry, ledger::Chain{}));
      }
    }
  }

  SimReport run() {
    std::uint64_t tick = 0;
    for (; tick <= cfg_.max_ticks; ++tick) {
      const auto now = static_cast<std::int64_t>(tick);
      while (!queue_.empty() && queue_.begin()->first.first == tick) {
        auto node = queue_.extract(queue_.begin());
        deliver(node.mapped(), now);
      }
      for (std::uint32_t id = 1; id <= cfg_.n; ++id) step(id, now);
      if (done()) break;
    }
    report_.ticks = std::min(tick, cfg_.max_ticks);
    finish();
    return std::move(report_);
  }

  const Replica<>* replica(std::uint32_t id) const {
    auto it = replicas_.find(id);
    return it == replicas_.end() ? nullptr : it->second.get();
  }

 private:
  struct Envelope {
    std::uint32_t from;
    std::uint32_t to;
    AgreementMessage message;
  };

  void record(SimEvent e) {
    if (!cfg_.record_trace) return;
    e.seq = next_event_++;
    report_.trace.push_back(std::move(e));
  }

  static SimEvent message_event(EventKind k, std::uint64_t tick, std::uint32_t from, std::uint32_t to,
                                const AgreementMessage& m, std::string detail) {
    SimEvent e;
    e.tick = tick;
    e.kind = k;
    e.from = from;
    e.to = to;
    e.message = m.kind;
    e.height = m.height;
    e.hash = m.proposal_hash;
    e.accept = m.accept;
    e.detail = std::move(detail);
    return e;
  }

  void send(std::uint32_t from, const Outbound& o, std::int64_t now) {
    std::vector<std::uint32_t> targets;
    if (o.to) {
      targets.push_back(o.to->value);
    } else {
      for (std::uint32_t id = 1; id <= cfg_.n; ++id)
        if (id != from) targets.push_back(id);
    }
    const auto& m = o.message;
    if (m.kind == MessageKind::ProposalResponse && m.accept) accept_voters_[{m.height, m.proposal_hash}].insert(m.sender.value);
    if (m.kind == MessageKind::ProposalCreated) accept_voters_[{m.height, m.proposal_hash}].insert(m.sender.value);
    for (auto to : targets) {
      if (to == from) continue;
      ++report_.messages.sent;
      switch (m.kind) {
        case MessageKind::ProposalCreated: ++report_.messages.created; break;
        case MessageKind::ProposalResponse: ++report_.messages.responses; break;
        case MessageKind::ProposalResolution: ++report_.messages.resolutions; break;
      }
      std::bernoulli_distribution drop(cfg_.drop_rate);
      if (cfg_.drop_rate > 0 && drop(rng_)) {
        ++report_.messages.dropped_network;
        record(message_event(EventKind::Drop, static_cast<std::uint64_t>(now), from, to, m, "Network"));
        continue;
      }
      std::uniform_int_distribution<std::uint32_t> delay(cfg_.delay_min, cfg_.delay_max);
      const std::uint64_t at = static_cast<std::uint64_t>(now) + delay(rng_);
      queue_.emplace(std::make_pair(at, next_msg_++), Envelope{from, to, m});
    }
  }

  void apply(std::uint32_t id, Effects&& e, std::int64_t now) {
    const bool mute = cfg_.fault_of(id) == FaultModel::Mute;
    if (e.timed_out) {
      SimEvent t;
      t.tick = static_cast<std::uint64_t>(now);
      t.kind = EventKind::Timeout;
      t.to = id;
      t.height = replicas_.at(id)->round().height;
      t.detail = "RoundTimeout";
      record(std::move(t));
    }
    for (const auto& b : e.committed) {
      SimEvent c;
      c.tick = static_cast<std::uint64_t>(now);
      c.kind = EventKind::Commit;
      c.to = id;
      c.height = b.header.index.height;
      c.hash = b.hash;
      c.detail = "committer=" + std::to_string(b.header.committer.value);
      record(std::move(c));
    }
    if (!mute)
      for (const auto& o : e.outbound) send(id, o, now);
  }

  void deliver(const Envelope& env, std::int64_t now) {
    const auto tick = static_cast<std::uint64_t>(now);
    const FaultModel f = cfg_.fault_of(env.to);
    if (f == FaultModel::Crashed) {
      ++report_.messages.dropped_by_node;
      record(message_event(EventKind::Drop, tick, env.from, env.to, env.message, "Crashed"));
      return;
    }
    ++report_.messages.delivered;
    if (f == FaultModel::Equivocator) {
      auto out = equivocators_.at(env.to).on_message(env.message);
      record(message_event(EventKind::Deliver, tick, env.from, env.to, env.message, "byzantine"));
      for (const auto& o : out) send(env.to, o, now);
      return;
    }
    auto& r = *replicas_.at(env.to);
    Effects e = r.handle(env.message, now);
    if (e.disposition == Disposition::Dropped) ++report_.messages.dropped_by_node;
    std::string detail(agreement::to_string(e.disposition));
    if (!e.reason.empty()) detail += ":" + e.reason;
    record(message_event(EventKind::Deliver, tick, env.from, env.to, env.message, detail));
    check_phases(r);
    apply(env.to, std::move(e), now);
  }

  void step(std::uint32_t id, std::int64_t now) {
    const FaultModel f = cfg_.fault_of(id);
    if (f == FaultModel::Crashed) return;
    if (f == FaultModel::Equivocator) {
      for (const auto& o : equivocators_.at(id).tick(now, rng_)) send(id, o, now);
      return;
    }
    auto& r = *replicas_.at(id);
    Effects e = r.tick(now);
    check_phases(r);
    apply(id, std::move(e), now);
    if (f == FaultModel::Spammer && now % cfg_.spam_interval == 0) {
      auto spam = make_spam(NodeId{id}, keys_[id - 1], r.tip(), r.last_committed(), now);
      send(id, Outbound{std::nullopt, spam}, now);
    }
  }

  void check_phases(const Replica<>& r) {
    using proposals::ProposalState;
    const auto& ph = r.round().phases;
    static constexpr ProposalState order[] = {ProposalState::Created, ProposalState::Response, ProposalState::Resolution,
                                              ProposalState::Committed};
    for (std::size_t i = 0; i < ph.size(); ++i) {
      if (ph[i] == ProposalState::Rejected) {
        if (i + 1 != ph.size()) report_.phases_monotone = false;
        continue;
      }
      if (i >= 4 || ph[i] != order[i]) report_.phases_monotone = false;
    }
  }

  bool done() const {
    bool any = false;
    for (const auto& [id, r] : replicas_) {
      if (cfg_.fault_of(id) != FaultModel::Honest) continue;
      any = true;
      if (r->height().height < cfg_.target_height) return false;
    }
    return any;
  }

  void finish() {
    report_.heights.assign(cfg_.n, 0);
    std::optional<std::size_t> min_accepts;
    bool committers_taken = false;
    for (std::uint32_t id = 1; id <= cfg_.n; ++id) {
      const ledger::Chain* chain = nullptr;
      if (auto it = replicas_.find(id); it != replicas_.end()) {
        chain = &it->second->ledger();
        if (it->second->appends() != chain->height().height) report_.appends_once = false;
      } else if (auto eq = equivocators_.find(id); eq != equivocators_.end()) {
        chain = &eq->second.chain();
      }
      if (!chain) continue;
      report_.heights[id - 1] = chain->height().height;
      if (cfg_.fault_of(id) != FaultModel::Honest) continue;
      for (std::uint64_t h = 1; h <= chain->height().height; ++h) {
        const auto& b = chain->at(h);
        report_.commits[h][id] = b.hash;
        const auto& voters = accept_voters_[{h, b.header.proposal_hash}];
        min_accepts = std::min(min_accepts.value_or(voters.size()), voters.size());
        if (!committers_taken) report_.committers[h] = b.header.committer.value;
      }
      committers_taken = true;
    }
    report_.min_accepts_per_commit = min_accepts.value_or(0);
    for (const auto& [h, per_node] : report_.commits) {
      const auto first = per_node.begin();
      for (auto it = std::next(first); it != per_node.end(); ++it)
        if (it->second != first->second)
          report_.conflicts.push_back({h, first->first, it->first, first->second, it->second});
    }
  }

  SimConfig cfg_;
  NetworkConfig net_;
  std::mt19937_64 rng_;
  std::vector<KeyPair> keys_;
  std::map<std::uint32_t, std::unique_ptr<Replica<>>> replicas_;
  std::map<std::uint32_t, Equivocator> equivocators_;
  std::multimap<std::pair<std::uint64_t, std::uint64_t>, Envelope> queue_;
  std::uint64_t next_msg_ = 0;
  std::uint64_t next_event_ = 0;
  std::map<std::pair<std::uint64_t, Digest>, std::set<std::uint32_t>> accept_voters_;
  SimReport report_;
};

inline SimReport run(const SimConfig& cfg) { return Simulator(cfg).run(); }

}  // namespace aos::netsim
