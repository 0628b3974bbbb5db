#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>

#include <spdlog/spdlog.h>

#include "aos/agreement/replica.hpp"
#include "aos/ledger/store.hpp"
#include "aos/node/config.hpp"
#include "aos/node/transport.hpp"
#include "aos/node/wire.hpp"
#include "aos/privacy/dp.hpp"

namespace aos::node {

inline constexpr const char* kKeyFile = "node.key";
inline constexpr const char* kAllocationsFile = "allocations.json";
inline constexpr const char* kReceiptsFile = "receipts.jsonl";

inline std::int64_t wall_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

inline json receipt_to_json(const tx::Receipt& r) {
  json j{{"height", r.height}, {"tx_id", r.tx_id.hex()}, {"tx_type", std::string(tx::to_string(r.tx_type))},
         {"status", r.status}};
  if (r.delta.amount > 0)
    j["delta"] = {{"debit", r.delta.debit.hex()}, {"credit", r.delta.credit.hex()}, {"amount", r.delta.amount}};
  return j;
}

inline void require_initialized(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / ledger::ChainStore::kFileName))
    throw Error(Errc::NotInitialized, "no chain in " + dir.string() + "; run init first");
}

/// Creates the data dir: genesis chain, node key and initial balances.
/// An existing node.key is kept, otherwise a fresh key is generated (from
/// `key_seed` if given).
inline json cmd_init(const NodeConfig& cfg, const std::optional<std::string>& key_seed = std::nullopt) {
  std::filesystem::create_directories(cfg.data_dir);
  if (std::filesystem::exists(cfg.data_dir / ledger::ChainStore::kFileName))
    throw Error(Errc::DirNotEmpty, cfg.data_dir.string() + " already holds a chain");
  const auto key_path = cfg.data_dir / kKeyFile;
  KeyPair keys;
  if (std::filesystem::exists(key_path)) {
    keys = load_keypair(key_path);
  } else {
    keys = key_seed ? generate_keypair(*key_seed) : random_keypair();
    write_json_file(key_path, keypair_to_json(keys));
    std::filesystem::permissions(key_path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
  }
  const bool matches = keys.public_key == cfg.self().public_key;
  if (!matches)
    spdlog::warn("node key {} does not match peers entry for node {}", keys.public_key.hex(), cfg.node_id.value);
  auto store = ledger::ChainStore::create(cfg.data_dir);
  write_json_file(cfg.data_dir / kAllocationsFile, allocations_to_json(cfg.allocations));
  return {{"data_dir", cfg.data_dir.string()},
          {"genesis_hash", store.tip().hash.hex()},
          {"public_key", keys.public_key.hex()},
          {"key_matches_config", matches}};
}

inline std::map<PublicKey, tx::Units> load_allocations(const std::filesystem::path& dir) {
  const auto path = dir / kAllocationsFile;
  if (!std::filesystem::exists(path)) return {};
  try {
    return allocations_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, path.string() + ": " + e.what());
  }
}

/// Balances after replaying every committed block from the allocations.
inline tx::AccountState replay_accounts(const ledger::Chain& chain, std::map<PublicKey, tx::Units> allocations) {
  tx::AccountState s(std::move(allocations));
  for (std::size_t h = 1; h < chain.size(); ++h) s.apply_all(chain.at(h).transactions, h);
  return s;
}

struct RunOptions {
  /// Stop proposing once this height is committed, linger, then return.
  std::optional<std::uint64_t> max_height;
  std::optional<double> dp_epsilon;
  std::int64_t linger_ms = 3000;
  const std::atomic<bool>* stop = nullptr;
};

/// Runs the replica until `stop` is set or max_height is reached.
/// Returns the final committed height.
inline std::uint64_t cmd_run(const NodeConfig& cfg, const RunOptions& run = {}) {
  require_initialized(cfg.data_dir);
  const KeyPair keys = load_keypair(cfg.data_dir / kKeyFile);
  if (keys.public_key != cfg.self().public_key)
    throw Error(Errc::PeerKeyMismatch, "node.key does not match the peers entry for node " + std::to_string(cfg.node_id.value));
  auto store = ledger::ChainStore::open(cfg.data_dir);
  auto accounts = replay_accounts(store.chain(), load_allocations(cfg.data_dir));

  agreement::ReplicaOptions opts;
  opts.propose_delay = cfg.block_interval_ms;
  const auto eps = run.dp_epsilon ? run.dp_epsilon : cfg.dp_epsilon;
  auto rng = std::make_shared<std::mt19937_64>(std::random_device{}());
  if (eps) {
    const privacy::DPConfig dp = privacy::DPConfig::with_epsilon(*eps);
    opts.prepare_txs = [dp, rng](std::vector<ledger::SealedTransaction> txs) {
      return privacy::inject_decoys(std::move(txs), dp, *rng);
    };
  }

  const auto start_height = store.height().height;
  agreement::Replica<ledger::ChainStore> replica(cfg.node_id, cfg.network(), keys, cfg.registry(), std::move(store),
                                                 std::move(accounts), opts);
  const auto receipts_path = cfg.data_dir / kReceiptsFile;
  replica.set_commit_hook([&](const ledger::Block& b, const std::vector<tx::Receipt>& receipts) {
    std::ofstream out(receipts_path, std::ios::app);
    for (const auto& r : receipts) out << receipt_to_json(r).dump() << '\n';
    spdlog::info("commit height={} hash={} txs={} committer={}", b.header.index.height, b.hash.hex().substr(0, 16),
                 b.transactions.size(), b.header.committer.value);
  });

  std::map<std::uint32_t, std::string> peer_addrs;
  for (const auto& p : cfg.peers)
    if (p.node_id != cfg.node_id) peer_addrs[p.node_id.value] = p.address;
  Inbox inbox;
  Transport transport(cfg.listen_address, peer_addrs, inbox);
  spdlog::info("node {} listening on {} at height {}", cfg.node_id.value, cfg.listen_address, start_height);

  auto send = [&](const agreement::Effects& e) {
    for (const auto& o : e.outbound) {
      const std::string payload = to_envelope(o.message).dump();
      if (o.to)
        transport.send(o.to->value, payload);
      else
        transport.broadcast(payload);
    }
  };

  auto on_inbound = [&](Inbound& in, std::int64_t now) {
    if (!in.error.empty()) {
      spdlog::info("drop frame: {}", in.error);
      return;
    }
    std::string kind;
    try {
      check_version(in.envelope);
      kind = in.envelope.at("kind").get<std::string>();
    } catch (const std::exception& e) {
      spdlog::info("drop envelope: {}", e.what());
      if (in.conn) in.conn->send_frame(submit_reply("error", std::nullopt, e.what()).dump());
      return;
    }
    if (kind == kSubmitTx) {
      json reply;
      try {
        const auto sealed = tx::sealed_from_json(in.envelope.at("body"));
        if (sealed.tx_type == tx::TxType::TypeB && !sealed.reveal)
          throw Error(Errc::Malformed, "Type B submission without reveal");
        replica.submit(sealed);
        reply = submit_reply("queued", sealed.tx_id);
        spdlog::info("queued tx {}", sealed.tx_id.hex().substr(0, 16));
      } catch (const Error& e) {
        reply = submit_reply("error", std::nullopt, e.what());
      } catch (const json::exception& e) {
        reply = submit_reply("error", std::nullopt, std::string("Malformed: ") + e.what());
      }
      if (in.conn) in.conn->send_frame(reply.dump());
      return;
    }
    agreement::AgreementMessage m;
    try {
      m = from_envelope(in.envelope);
    } catch (const Error& e) {
      spdlog::info("drop: {}", e.what());
      return;
    }
    if (run.max_height && m.height > *run.max_height) {
      spdlog::debug("drop MaxHeight from node {} height {}", m.sender.value, m.height);
      return;
    }
    auto e = replica.handle(m, now);
    if (e.disposition == agreement::Disposition::Dropped)
      spdlog::info("drop {} {} from node {} height {}", agreement::to_string(m.kind), e.reason, m.sender.value, m.height);
    else
      spdlog::debug("{} {} from node {} height {}", agreement::to_string(e.disposition), agreement::to_string(m.kind),
                    m.sender.value, m.height);
    send(e);
  };

  std::optional<std::int64_t> reached_at;
  while (!(run.stop && run.stop->load())) {
    if (auto in = inbox.pop_for(std::chrono::milliseconds(10))) on_inbound(*in, wall_ms());
    const auto now = wall_ms();
    if (run.max_height && replica.height().height >= *run.max_height) {
      // Keep answering laggards with certificates, but stop starting rounds.
      replica.set_auto_propose(false);
      if (!reached_at) {
        reached_at = now;
        spdlog::info("reached max height {}", *run.max_height);
      }
      if (now - *reached_at >= run.linger_ms) break;
      continue;
    }
    auto e = replica.tick(now);
    if (e.timed_out) spdlog::info("round timeout at height {}", replica.height().height + 1);
    send(e);
  }
  transport.stop();
  return replica.height().height;
}

/// Sends one sealed transaction to a node and returns its reply body.
inline json cmd_submit_tx(const std::string& address, const tx::SealedTransaction& sealed,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(5000)) {
  const json reply = request(address, submit_envelope(sealed), timeout);
  check_version(reply);
  if (reply.value("kind", "") != kSubmitTxReply) throw Error(Errc::Malformed, "unexpected reply kind");
  return reply.at("body");
}

struct InspectQuery {
  std::optional<std::uint64_t> height;
  std::optional<Digest> tx_id;
  bool validate = false;
  bool balances = false;
};

/// Line-tolerant scan of the chain file: every parsed block plus the first
/// line that failed to parse, if any.
inline std::pair<std::vector<ledger::Block>, std::optional<std::uint64_t>> scan_chain(const std::filesystem::path& dir) {
  std::ifstream in(dir / ledger::ChainStore::kFileName);
  if (!in) throw Error(Errc::NotInitialized, "no chain in " + dir.string());
  std::vector<ledger::Block> blocks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      blocks.push_back(ledger::block_from_json(json::parse(line)));
    } catch (const std::exception&) {
      return {std::move(blocks), blocks.size()};
    }
  }
  return {std::move(blocks), std::nullopt};
}

inline json cmd_inspect(const std::filesystem::path& dir, const InspectQuery& q) {
  auto [blocks, parse_fail] = scan_chain(dir);
  if (q.validate) {
    const auto v = ledger::validate_chain(ledger::Chain::from_blocks(blocks));
    std::optional<std::uint64_t> bad = v.first_bad_index;
    if (parse_fail && (!bad || *parse_fail < *bad)) bad = parse_fail;
    json j{{"valid", !bad}, {"height", blocks.empty() ? 0 : blocks.back().header.index.height}};
    j["first_bad_index"] = bad ? json(*bad) : json(nullptr);
    return j;
  }
  const ledger::Chain chain = ledger::Chain::from_blocks(std::move(blocks));
  if (q.height) return ledger::to_json_value(chain.at(*q.height));
  if (q.tx_id) {
    // Status comes from a replay, so it does not depend on receipts.jsonl.
    tx::AccountState s(load_allocations(dir));
    for (std::size_t h = 1; h < chain.size(); ++h) {
      const auto& b = chain.at(h);
      const auto receipts = s.apply_all(b.transactions, h);
      for (std::size_t i = 0; i < b.transactions.size(); ++i)
        if (b.transactions[i].tx_id == *q.tx_id)
          return {{"height", h}, {"transaction", tx::to_json_value(b.transactions[i])}, {"status", receipts[i].status}};
    }
    throw Error(Errc::NotFound, "transaction " + q.tx_id->hex() + " is not committed");
  }
  if (q.balances) {
    const auto s = replay_accounts(chain, load_allocations(dir));
    json bal = json::object();
    for (const auto& [pk, v] : s.balances()) bal[pk.hex()] = v;
    return {{"height", chain.height().height}, {"balances", bal}, {"total_supply", s.total_supply()}};
  }
  return {{"height", chain.height().height}, {"tip_hash", chain.tip().hash.hex()}, {"genesis_hash", chain.at(0).hash.hex()}};
}

}  // namespace aos::node
