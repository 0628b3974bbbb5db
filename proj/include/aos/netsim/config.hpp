#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aos/core/error.hpp"

namespace aos::netsim {

enum class FaultModel : std::uint8_t { Honest, Crashed, Equivocator, Mute, Spammer };

constexpr std::string_view to_string(FaultModel f) noexcept {
  switch (f) {
    case FaultModel::Honest: return "honest";
    case FaultModel::Crashed: return "crashed";
    case FaultModel::Equivocator: return "byzantine-equivocator";
    case FaultModel::Mute: return "byzantine-mute";
    case FaultModel::Spammer: return "byzantine-spammer";
  }
  return "?";
}

inline FaultModel fault_from_string(std::string_view s) {
  for (auto f : {FaultModel::Honest, FaultModel::Crashed, FaultModel::Equivocator, FaultModel::Mute, FaultModel::Spammer})
    if (to_string(f) == s) return f;
  throw Error(Errc::Malformed, "unknown fault model: " + std::string(s));
}

inline bool is_byzantine(FaultModel f) noexcept {
  return f == FaultModel::Equivocator || f == FaultModel::Mute || f == FaultModel::Spammer;
}

struct SimConfig {
  std::uint64_t seed = 0;
  std::uint32_t n = 4;
  /// One entry per node id (index id-1); missing entries are honest.
  std::vector<FaultModel> faults;
  double drop_rate = 0.0;
  std::uint32_t delay_min = 1;
  std::uint32_t delay_max = 3;
  std::uint64_t max_ticks = 5000;
  std::int64_t round_timeout = 40;
  /// Stop early once every honest node reaches this height.
  std::uint64_t target_height = 10;
  /// Ticks between invalid proposals from a spammer.
  std::uint32_t spam_interval = 5;
  bool record_trace = true;

  FaultModel fault_of(std::uint32_t id) const {
    return id >= 1 && id <= faults.size() ? faults[id - 1] : FaultModel::Honest;
  }

  std::uint32_t byzantine_count() const {
    std::uint32_t c = 0;
    for (std::uint32_t id = 1; id <= n; ++id) c += is_byzantine(fault_of(id)) ? 1 : 0;
    return c;
  }

  void validate() const {
    if (n == 0) throw Error(Errc::InvalidNodeCount, "simulation needs at least one node");
    if (faults.size() > n) throw Error(Errc::InvalidParameters, "more fault entries than nodes");
    if (!(drop_rate >= 0.0 && drop_rate <= 1.0)) throw Error(Errc::InvalidParameters, "drop_rate outside [0,1]");
    if (delay_min < 1 || delay_max < delay_min) throw Error(Errc::InvalidParameters, "delay bounds need 1 <= min <= max");
    if (round_timeout < 1) throw Error(Errc::InvalidParameters, "round_timeout must be positive");
    if (spam_interval < 1) throw Error(Errc::InvalidParameters, "spam_interval must be positive");
  }
};

inline nlohmann::json to_json_value(const SimConfig& c) {
  nlohmann::json faults = nlohmann::json::array();
  for (std::uint32_t id = 1; id <= c.n; ++id) faults.push_back(std::string(to_string(c.fault_of(id))));
  return {{"seed", c.seed},
          {"n", c.n},
          {"fault_model", faults},
          {"drop_rate", c.drop_rate},
          {"delay", {{"min", c.delay_min}, {"max", c.delay_max}}},
          {"max_ticks", c.max_ticks},
          {"round_timeout", c.round_timeout},
          {"target_height", c.target_height},
          {"spam_interval", c.spam_interval},
          {"record_trace", c.record_trace}};
}

/// Missing keys keep their defaults. `fault_model` is either an array with
/// one entry per node or an object keyed by node id.
inline SimConfig sim_config_from_json(const nlohmann::json& j) {
  try {
    SimConfig c;
    c.seed = j.value("seed", c.seed);
    c.n = j.value("n", c.n);
    if (j.contains("fault_model")) {
      const auto& f = j.at("fault_model");
      if (f.is_array()) {
        for (const auto& s : f) c.faults.push_back(fault_from_string(s.get<std::string>()));
      } else {
        c.faults.assign(c.n, FaultModel::Honest);
        for (const auto& [k, v] : f.items()) {
          const auto id = static_cast<std::uint32_t>(std::stoul(k));
          if (id < 1 || id > c.n) throw Error(Errc::NodeOutOfRange, "fault_model key " + k);
          c.faults[id - 1] = fault_from_string(v.get<std::string>());
        }
      }
    }
    c.drop_rate = j.value("drop_rate", c.drop_rate);
    if (j.contains("delay")) {
      c.delay_min = j.at("delay").value("min", c.delay_min);
      c.delay_max = j.at("delay").value("max", c.delay_max);
    }
    c.max_ticks = j.value("max_ticks", c.max_ticks);
    c.round_timeout = j.value("round_timeout", c.round_timeout);
    c.target_height = j.value("target_height", c.target_height);
    c.spam_interval = j.value("spam_interval", c.spam_interval);
    c.record_trace = j.value("record_trace", c.record_trace);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Malformed, e.what());
  } catch (const std::logic_error& e) {
    throw Error(Errc::Malformed, e.what());
  }
}

inline SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Malformed, e.what());
  }
  return sim_config_from_json(j);
}

}  // namespace aos::netsim
