#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "aos/ledger/chain.hpp"
#include "aos/transactions/json.hpp"

namespace aos::ledger {

using nlohmann::json;

inline json to_json_value(const Block& b) {
  json txs = json::array();
  for (const auto& t : b.transactions) txs.push_back(tx::to_json_value(t));
  // Key order in the file follows nlohmann's sorted object keys; hashes never
  // depend on it.
  return json{{"index", b.header.index.height},
              {"parent_hash", b.header.parent_hash.hex()},
              {"proposal_hash", b.header.proposal_hash.hex()},
              {"committer", b.header.committer.value},
              {"timestamp", b.header.timestamp},
              {"tx_root", b.header.tx_root.hex()},
              {"hash", b.hash.hex()},
              {"transactions", std::move(txs)}};
}

inline Block block_from_json(const json& j) {
  try {
    Block b;
    b.header.index = BlockIndex{j.at("index").get<std::uint64_t>()};
    b.header.parent_hash = Digest::from_hex(j.at("parent_hash").get<std::string>());
    b.header.proposal_hash = Digest::from_hex(j.at("proposal_hash").get<std::string>());
    b.header.committer = NodeId{j.at("committer").get<std::uint32_t>()};
    b.header.timestamp = j.at("timestamp").get<std::int64_t>();
    b.header.tx_root = Digest::from_hex(j.at("tx_root").get<std::string>());
    b.hash = Digest::from_hex(j.at("hash").get<std::string>());
    for (const auto& t : j.at("transactions")) b.transactions.push_back(tx::sealed_from_json(t));
    return b;
  } catch (const json::exception& e) {
    throw Error(Errc::Corrupt, e.what());
  } catch (const Error& e) {
    throw Error(Errc::Corrupt, e.what());
  }
}

/// Reads every complete line of a chain file. A trailing line without a
/// newline is an append in progress and is skipped.
inline std::vector<Block> read_chain_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<Block> out;
  std::size_t start = 0;
  while (true) {
    const auto nl = content.find('\n', start);
    if (nl == std::string::npos) break;
    std::string_view line(content.data() + start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::Corrupt, "line " + std::to_string(out.size()) + ": " + e.what());
    }
    out.push_back(block_from_json(j));
  }
  return out;
}

/// Chain persisted as `chain.jsonl`, one block per line. Single writer; each
/// append is one write(2) of a complete line followed by fsync, so readers
/// never observe a partial block.
class ChainStore {
 public:
  static constexpr const char* kFileName = "chain.jsonl";

  /// Creates the file with the genesis block. Fails if it exists.
  static ChainStore create(const std::filesystem::path& dir) {
    const auto path = dir / kFileName;
    if (std::filesystem::exists(path)) throw Error(Errc::DirNotEmpty, path.string());
    ChainStore s(path, Chain{});
    s.write_line(s.chain_.tip());
    return s;
  }

  /// Loads and validates an existing chain file.
  static ChainStore open(const std::filesystem::path& dir) {
    const auto path = dir / kFileName;
    auto blocks = read_chain_file(path);
    Chain c = Chain::from_blocks(std::move(blocks));
    const auto v = validate_chain(c);
    if (!v.valid) throw Error(Errc::Corrupt, "chain invalid at height " + std::to_string(*v.first_bad_index));
    return ChainStore(path, std::move(c));
  }

  BlockIndex height() const noexcept { return chain_.height(); }
  const Block& tip() const noexcept { return chain_.tip(); }
  const Chain& chain() const noexcept { return chain_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  void append(Block block) {
    validate_link(chain_.tip(), block);
    write_line(block);
    chain_.append(std::move(block));
  }

 private:
  ChainStore(std::filesystem::path path, Chain chain) : path_(std::move(path)), chain_(std::move(chain)) {}

  void write_line(const Block& b) {
    const std::string line = to_json_value(b).dump() + "\n";
    const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw Error(Errc::Io, "cannot open " + path_.string());
    std::size_t off = 0;
    while (off < line.size()) {
      const ssize_t n = ::write(fd, line.data() + off, line.size() - off);
      if (n < 0) {
        ::close(fd);
        throw Error(Errc::Io, "write failed on " + path_.string());
      }
      off += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
  }

  std::filesystem::path path_;
  Chain chain_;
};

}  // namespace aos::ledger
