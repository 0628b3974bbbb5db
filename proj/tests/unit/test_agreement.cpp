#include <gtest/gtest.h>

#include <deque>
#include <memory>
#include <random>

#include "aos/agreement.hpp"
#include "../fixtures.hpp"
#include "../support.hpp"

using namespace aos;
using namespace aos::agreement;

namespace {

/// In-memory FIFO network over n replicas. `cut` nodes neither send nor
/// receive.
struct Bus {
  explicit Bus(std::uint32_t n, std::int64_t timeout = 50, ReplicaOptions opts = {}) : cfg(NetworkConfig::for_nodes(n, timeout)) {
    std::vector<PublicKey> registry;
    for (std::uint32_t id = 1; id <= n; ++id) {
      keys.push_back(generate_keypair("agreement test node " + std::to_string(id)));
      registry.push_back(keys.back().public_key);
    }
    for (std::uint32_t id = 1; id <= n; ++id)
      nodes.push_back(std::make_unique<Replica<>>(NodeId{id}, cfg, keys[id - 1], registry, ledger::Chain{}, tx::AccountState{}, opts));
  }

  Replica<>& at(std::uint32_t id) { return *nodes[id - 1]; }

  void post(std::uint32_t from, const Effects& e) {
    if (cut.contains(from)) return;
    for (const auto& o : e.outbound) {
      if (o.to) {
        queue.push_back({o.to->value, o.message});
      } else {
        for (std::uint32_t id = 1; id <= cfg.n; ++id)
          if (id != from) queue.push_back({id, o.message});
      }
    }
  }

  void step() {
    for (std::uint32_t id = 1; id <= cfg.n; ++id)
      if (!cut.contains(id)) post(id, at(id).tick(now));
    while (!queue.empty()) {
      auto [to, m] = queue.front();
      queue.pop_front();
      if (cut.contains(to)) continue;
      const Effects e = at(to).handle(m, now);
      log.push_back(e);
      post(to, e);
    }
    ++now;
  }

  bool run_until(std::uint64_t height, int max_steps = 5000) {
    for (int i = 0; i < max_steps; ++i) {
      bool all = true;
      for (std::uint32_t id = 1; id <= cfg.n; ++id)
        if (!cut.contains(id) && at(id).height().height < height) all = false;
      if (all) return true;
      step();
    }
    return false;
  }

  NetworkConfig cfg;
  std::vector<KeyPair> keys;
  std::vector<std::unique_ptr<Replica<>>> nodes;
  std::deque<std::pair<std::uint32_t, AgreementMessage>> queue;
  std::set<std::uint32_t> cut;
  std::vector<Effects> log;
  std::int64_t now = 0;
};

}  // namespace

TEST(Quorum, Sizes) {
  EXPECT_EQ(NetworkConfig::for_nodes(1, 1).response_quorum, 1u);
  EXPECT_EQ(NetworkConfig::for_nodes(3, 1).response_quorum, 1u);
  EXPECT_EQ(NetworkConfig::for_nodes(4, 1).f, 1u);
  EXPECT_EQ(NetworkConfig::for_nodes(4, 1).response_quorum, 3u);
  EXPECT_EQ(NetworkConfig::for_nodes(7, 1).resolution_quorum, 5u);
}

TEST(Replica, FourNodesAgree) {
  Bus bus(4);
  ASSERT_TRUE(bus.run_until(6));
  for (std::uint32_t id = 2; id <= 4; ++id)
    for (std::uint64_t h = 0; h <= 6; ++h) EXPECT_EQ(bus.at(id).ledger().at(h), bus.at(1).ledger().at(h));
  for (std::uint64_t h = 1; h <= 6; ++h)
    EXPECT_EQ(bus.at(1).ledger().at(h).header.committer, proposals::pce(4, BlockIndex{h - 1}));
  EXPECT_TRUE(ledger::validate_chain(bus.at(3).ledger()).valid);
}

TEST(Replica, SingleNodeCommitsAlone) {
  Bus bus(1);
  ASSERT_TRUE(bus.run_until(3));
}

TEST(Replica, TwoNodesAgree) {
  Bus bus(2);
  ASSERT_TRUE(bus.run_until(10));
  EXPECT_EQ(bus.at(1).ledger().blocks(), bus.at(2).ledger().blocks());
}

TEST(Replica, EveryMessageIsAnsweredOrDroppedWithReason) {
  Bus bus(4);
  ASSERT_TRUE(bus.run_until(4));
  ASSERT_FALSE(bus.log.empty());
  for (const auto& e : bus.log) {
    if (e.disposition == Disposition::Dropped) {
      EXPECT_FALSE(e.reason.empty());
    }
  }
}

TEST(Replica, RejectsForgedAndUnknownMessages) {
  Bus bus(4);
  auto& r = bus.at(2);
  const auto p = proposals::create_proposal(NodeId{2}, 4, ledger::genesis(), {}, proposals::ProposalRef::genesis(), 0);
  auto m = make_created(p, NodeId{2}, bus.keys[1].private_key);
  m.sender = NodeId{3};
  EXPECT_EQ(bus.at(1).handle(m, 0).reason, "BadSignature");
  m.sender = NodeId{9};
  EXPECT_EQ(bus.at(1).handle(m, 0).reason, "UnknownSender");
  EXPECT_EQ(r.handle(make_created(p, NodeId{2}, bus.keys[1].private_key), 0).reason, "SelfMessage");
}

TEST(Replica, WrongProposerGetsRejectVote) {
  Bus bus(4);
  // Height 1 belongs to node 2; node 3 proposes anyway.
  auto p = proposals::create_proposal(NodeId{2}, 4, ledger::genesis(), {}, proposals::ProposalRef::genesis(), 0);
  p.proposer = NodeId{3};
  p.block.header.committer = NodeId{3};
  p.block.hash = p.block.recompute_hash();
  p.hash = p.compute_hash();
  const auto e = bus.at(1).handle(make_created(p, NodeId{3}, bus.keys[2].private_key), 0);
  EXPECT_EQ(e.reason, "WrongProposer");
  ASSERT_EQ(e.outbound.size(), 1u);
  EXPECT_EQ(e.outbound[0].message.kind, MessageKind::ProposalResponse);
  EXPECT_FALSE(e.outbound[0].message.accept);
}

TEST(Replica, InvalidProposalRejected) {
  Bus bus(4);
  auto p = proposals::create_proposal(NodeId{2}, 4, ledger::genesis(), {}, proposals::ProposalRef::genesis(), 0);
  p.proposal_id = 7;
  p.hash = p.compute_hash();
  const auto e = bus.at(1).handle(make_created(p, NodeId{2}, bus.keys[1].private_key), 0);
  ASSERT_FALSE(e.outbound.empty());
  EXPECT_FALSE(e.outbound[0].message.accept);
  EXPECT_FALSE(bus.at(1).round().proposal.has_value());
}

TEST(Replica, DuplicateVoteDropped) {
  Bus bus(4);
  const auto v = make_vote(MessageKind::ProposalResponse, 1, hash(std::string_view("x")), NodeId{3}, true, bus.keys[2].private_key);
  bus.at(1).handle(v, 0);
  EXPECT_EQ(bus.at(1).handle(v, 0).reason, "DuplicateVote");
}

TEST(Replica, FutureMessagesBufferedOrDropped) {
  Bus bus(4);
  const auto near = make_vote(MessageKind::ProposalResponse, 5, Digest{}, NodeId{3}, true, bus.keys[2].private_key);
  EXPECT_EQ(bus.at(1).handle(near, 0).disposition, Disposition::Buffered);
  const auto far = make_vote(MessageKind::ProposalResponse, 500, Digest{}, NodeId{3}, true, bus.keys[2].private_key);
  EXPECT_EQ(bus.at(1).handle(far, 0).reason, "FutureHeight");
}

TEST(Replica, CrashedProposerStallsWithoutViewChange) {
  Bus bus(4, 20);
  bus.cut.insert(2);  // elected at height 1
  ASSERT_FALSE(bus.run_until(1, 300));
  bool timed_out = false;
  for (std::uint32_t id : {1u, 3u, 4u}) {
    EXPECT_EQ(bus.at(id).height().height, 0u);
    timed_out = timed_out || bus.at(id).round().arm > 0;
  }
  EXPECT_TRUE(timed_out);
  bus.cut.clear();
  EXPECT_TRUE(bus.run_until(3, 2000));
}

TEST(Replica, LaggingNodeCatchesUpFromCertificates) {
  Bus bus(4, 20);
  bus.cut.insert(4);
  // Node 4 is only needed as proposer at height 3 (tip 2).
  ASSERT_TRUE(bus.run_until(2));
  bus.cut.clear();
  ASSERT_TRUE(bus.run_until(6, 5000));
  for (std::uint64_t h = 0; h <= 6; ++h) EXPECT_EQ(bus.at(4).ledger().at(h), bus.at(1).ledger().at(h));
}

TEST(Replica, TransactionsFlowIntoBlocks) {
  Bus bus(3);
  std::mt19937_64 rng(2);
  const auto t = fixtures::random_tx(rng);
  EXPECT_EQ(bus.at(1).submit(t), t.tx_id);
  EXPECT_EQ(bus.at(1).submit(t), t.tx_id);
  EXPECT_EQ(bus.at(1).pool_size(), 1u);
  ASSERT_TRUE(bus.run_until(4));
  int inclusions = 0;
  for (const auto& b : bus.at(2).ledger().blocks())
    for (const auto& x : b.transactions) inclusions += x.tx_id == t.tx_id;
  EXPECT_EQ(inclusions, 1);
  EXPECT_EQ(bus.at(1).pool_size(), 0u);
  EXPECT_TRUE(bus.at(3).accounts().is_committed(t.tx_id));
}

TEST(Replica, PoolLimit) {
  ReplicaOptions opts;
  opts.max_pool = 2;
  Bus bus(1, 50, opts);
  std::mt19937_64 rng(4);
  bus.at(1).submit(fixtures::random_tx(rng));
  bus.at(1).submit(fixtures::random_tx(rng));
  EXPECT_ERRC(bus.at(1).submit(fixtures::random_tx(rng)), Errc::QueueFull);
}

TEST(Replica, AppendsOncePerHeight) {
  Bus bus(4);
  ASSERT_TRUE(bus.run_until(8));
  for (std::uint32_t id = 1; id <= 4; ++id) EXPECT_EQ(bus.at(id).appends(), bus.at(id).height().height);
}

TEST(Replica, ConstructorChecks) {
  const auto cfg = NetworkConfig::for_nodes(2, 10);
  const auto k1 = generate_keypair("ctor check key one 1");
  const auto k2 = generate_keypair("ctor check key two 2");
  EXPECT_ERRC(Replica<>(NodeId{3}, cfg, k1, {k1.public_key, k2.public_key}, ledger::Chain{}), Errc::NodeOutOfRange);
  EXPECT_ERRC(Replica<>(NodeId{1}, cfg, k1, {k2.public_key, k1.public_key}, ledger::Chain{}), Errc::PeerKeyMismatch);
  EXPECT_ERRC(Replica<>(NodeId{1}, cfg, k1, {k1.public_key}, ledger::Chain{}), Errc::InvalidNodeCount);
}
