#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aos/agreement/message.hpp"
#include "aos/core.hpp"

namespace aos::node {

using nlohmann::json;

struct PeerInfo {
  NodeId node_id;
  std::string address;
  PublicKey public_key;
};

/// Deployment config. `peers` lists every node, this one included, ordered
/// by id 1..n; every node must carry the same list.
struct NodeConfig {
  NodeId node_id;
  std::string listen_address;
  std::vector<PeerInfo> peers;
  std::filesystem::path data_dir;
  std::int64_t round_timeout_ms = 2000;
  /// Pause between a commit and the next proposal.
  std::int64_t block_interval_ms = 50;
  std::optional<double> dp_epsilon;
  /// Initial balances, copied into the data dir by init.
  std::map<PublicKey, std::uint64_t> allocations;

  std::uint32_t n() const { return static_cast<std::uint32_t>(peers.size()); }
  std::vector<PublicKey> registry() const {
    std::vector<PublicKey> r;
    for (const auto& p : peers) r.push_back(p.public_key);
    return r;
  }
  const PeerInfo& self() const { return peers.at(node_id.value - 1); }
  agreement::NetworkConfig network() const { return agreement::NetworkConfig::for_nodes(n(), round_timeout_ms); }

  void validate() const {
    if (peers.empty()) throw Error(Errc::InvalidNodeCount, "peers list is empty");
    std::set<PublicKey> keys;
    for (std::size_t i = 0; i < peers.size(); ++i) {
      if (peers[i].node_id.value != i + 1)
        throw Error(Errc::InvalidParameters, "peers must be listed in id order 1..n; entry " + std::to_string(i) +
                                                 " has id " + std::to_string(peers[i].node_id.value));
      if (!keys.insert(peers[i].public_key).second)
        throw Error(Errc::InvalidParameters, "duplicate public key for node " + std::to_string(i + 1));
    }
    if (node_id.value < 1 || node_id.value > peers.size())
      throw Error(Errc::NodeOutOfRange, "node_id " + std::to_string(node_id.value) + " is not in peers");
    if (listen_address.empty()) throw Error(Errc::InvalidParameters, "listen_address is empty");
    if (data_dir.empty()) throw Error(Errc::InvalidParameters, "data_dir is empty");
    if (round_timeout_ms < 1) throw Error(Errc::InvalidParameters, "round_timeout_ms must be positive");
    if (block_interval_ms < 0) throw Error(Errc::InvalidParameters, "block_interval_ms must not be negative");
    if (dp_epsilon && !(*dp_epsilon > 0.0)) throw Error(Errc::InvalidEpsilon, "dp_epsilon must be positive");
  }
};

inline json allocations_to_json(const std::map<PublicKey, std::uint64_t>& a) {
  json j = json::object();
  for (const auto& [pk, v] : a) j[pk.hex()] = v;
  return j;
}

inline std::map<PublicKey, std::uint64_t> allocations_from_json(const json& j) {
  std::map<PublicKey, std::uint64_t> a;
  for (const auto& [k, v] : j.items()) a[PublicKey::from_hex(k)] = v.get<std::uint64_t>();
  return a;
}

inline json to_json_value(const NodeConfig& c) {
  json peers = json::array();
  for (const auto& p : c.peers)
    peers.push_back({{"node_id", p.node_id.value}, {"address", p.address}, {"public_key", p.public_key.hex()}});
  json j{{"node_id", c.node_id.value},
         {"listen_address", c.listen_address},
         {"peers", peers},
         {"data_dir", c.data_dir.string()},
         {"round_timeout_ms", c.round_timeout_ms},
         {"block_interval_ms", c.block_interval_ms},
         {"allocations", allocations_to_json(c.allocations)}};
  if (c.dp_epsilon) j["dp_epsilon"] = *c.dp_epsilon;
  return j;
}

inline NodeConfig node_config_from_json(const json& j) {
  try {
    NodeConfig c;
    c.node_id = NodeId{j.at("node_id").get<std::uint32_t>()};
    c.listen_address = j.at("listen_address").get<std::string>();
    for (const auto& p : j.at("peers"))
      c.peers.push_back({NodeId{p.at("node_id").get<std::uint32_t>()}, p.at("address").get<std::string>(),
                         PublicKey::from_hex(p.at("public_key").get<std::string>())});
    c.data_dir = j.at("data_dir").get<std::string>();
    c.round_timeout_ms = j.value("round_timeout_ms", c.round_timeout_ms);
    c.block_interval_ms = j.value("block_interval_ms", c.block_interval_ms);
    if (j.contains("dp_epsilon") && !j.at("dp_epsilon").is_null()) c.dp_epsilon = j.at("dp_epsilon").get<double>();
    if (j.contains("allocations")) c.allocations = allocations_from_json(j.at("allocations"));
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::BadHex) throw Error(Errc::Malformed, std::string("config: ") + e.what());
    throw;
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, path.string() + ": " + e.what());
  }
}

/// Writes via a temporary file and rename so readers never see half a file.
inline void write_json_file(const std::filesystem::path& path, const json& j) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp);
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

inline NodeConfig load_node_config(const std::filesystem::path& path) { return node_config_from_json(read_json_file(path)); }

/// Key file: {"public_key": hex, "private_key": hex}.
inline json keypair_to_json(const KeyPair& k) {
  return {{"public_key", k.public_key.hex()}, {"private_key", k.private_key.hex()}};
}

inline KeyPair keypair_from_json(const json& j) {
  try {
    KeyPair k{SecretKey::from_hex(j.at("private_key").get<std::string>()), PublicKey::from_hex(j.at("public_key").get<std::string>())};
    if (public_key_of(k.private_key) != k.public_key) throw Error(Errc::KeyMismatch, "key file halves do not match");
    return k;
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, std::string("key file: ") + e.what());
  }
}

inline KeyPair load_keypair(const std::filesystem::path& path) { return keypair_from_json(read_json_file(path)); }

}  // namespace aos::node
