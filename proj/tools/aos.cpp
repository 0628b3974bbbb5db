#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "aos/mechanisms.hpp"
#include "aos/netsim.hpp"
#include "aos/node.hpp"
#include "aos/transactions.hpp"
#include "aos/txalgebra.hpp"

namespace {

using aos::node::json;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

/// --data-dir beats AOS_DATA_DIR, which beats the config file.
std::filesystem::path resolve_data_dir(const std::string& flag, const std::filesystem::path& from_config) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("AOS_DATA_DIR"); env && *env) return env;
  return from_config;
}

aos::node::NodeConfig load_config(const std::string& path, const std::string& data_dir) {
  auto cfg = aos::node::load_node_config(path);
  cfg.data_dir = resolve_data_dir(data_dir, cfg.data_dir);
  return cfg;
}

/// Accepts either a bare sealed transaction or a make-tx-* output file.
aos::tx::SealedTransaction load_sealed(const std::string& path) {
  const json j = aos::node::read_json_file(path);
  return aos::tx::sealed_from_json(j.contains("sealed") ? j.at("sealed") : j);
}

/// A public key in hex, or a key file holding one.
aos::PublicKey recipient_key(const std::string& arg) {
  if (arg.size() == 64 && !std::filesystem::exists(arg)) return aos::PublicKey::from_hex(arg);
  return aos::PublicKey::from_hex(aos::node::read_json_file(arg).at("public_key").get<std::string>());
}

void write_output(const std::string& out, const json& j) {
  if (out.empty()) {
    print(j);
    return;
  }
  aos::node::write_json_file(out, j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aos: proposal-based replicated ledger node and tools"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off");

  // init
  auto* init = app.add_subcommand("init", "create a data dir with the genesis block and a node key");
  std::string init_config, init_dir, init_seed;
  init->add_option("--config", init_config, "node config JSON")->required();
  init->add_option("--data-dir", init_dir);
  init->add_option("--key-seed", init_seed, "derive the node key from this seed instead of randomly");

  // run
  auto* run = app.add_subcommand("run", "run a node until interrupted or --max-height is reached");
  std::string run_config, run_dir;
  std::optional<std::uint64_t> max_height;
  std::optional<double> dp_epsilon;
  std::int64_t linger_ms = 3000;
  run->add_option("--config", run_config, "node config JSON")->required();
  run->add_option("--data-dir", run_dir);
  run->add_option("--max-height", max_height, "stop proposing at this height, linger, then exit");
  run->add_option("--dp-epsilon", dp_epsilon, "inject decoy transactions with this epsilon");
  run->add_option("--linger-ms", linger_ms, "time to keep serving peers after --max-height");

  // submit-tx
  auto* submit = app.add_subcommand("submit-tx", "send a sealed transaction to a running node");
  std::string submit_to, submit_file;
  submit->add_option("--to", submit_to, "node address host:port")->required();
  submit->add_option("--tx", submit_file, "sealed transaction JSON")->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "read-only queries against a data dir");
  std::string inspect_dir, inspect_tx;
  std::optional<std::uint64_t> inspect_height;
  bool inspect_validate = false, inspect_balances = false;
  inspect->add_option("--data-dir", inspect_dir);
  auto* q_height = inspect->add_option("--height", inspect_height, "print the block at this height");
  auto* q_tx = inspect->add_option("--tx", inspect_tx, "find a committed transaction by id");
  auto* q_validate = inspect->add_flag("--validate", inspect_validate, "re-hash the whole chain");
  auto* q_balances = inspect->add_flag("--balances", inspect_balances, "replayed balances and total supply");
  q_height->excludes(q_tx)->excludes(q_validate)->excludes(q_balances);
  q_tx->excludes(q_validate)->excludes(q_balances);
  q_validate->excludes(q_balances);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the deterministic network simulator");
  std::string sim_config, sim_trace;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--config", sim_config, "scenario JSON")->required();
  simulate->add_option("--seed", sim_seed, "override the scenario seed");
  simulate->add_option("--trace", sim_trace, "write the event trace as JSON lines");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "write a key file");
  std::string keygen_seed, keygen_out;
  keygen->add_option("--seed", keygen_seed, "deterministic seed (at least 16 bytes)");
  keygen->add_option("--out", keygen_out, "key file path")->required();

  // make-tx-a
  auto* make_a = app.add_subcommand("make-tx-a", "build, sign and seal a Type A transaction");
  std::string a_key, a_recipient, a_program, a_out;
  std::uint64_t a_value = 0;
  make_a->add_option("--key", a_key, "sender key file")->required();
  make_a->add_option("--recipient", a_recipient, "recipient public key (hex) or key file")->required();
  make_a->add_option("--program", a_program, "boolean program, e.g. \"A & B\"")->required();
  make_a->add_option("--value", a_value, "units moved per unit of program output")->required();
  make_a->add_option("--out", a_out);

  // make-tx-b
  auto* make_b = app.add_subcommand("make-tx-b", "invoke a received Type A");
  std::string b_key, b_target, b_out;
  std::vector<std::string> b_binds;
  make_b->add_option("--key", b_key, "recipient key file")->required();
  make_b->add_option("--target", b_target, "Type A file from make-tx-a")->required();
  make_b->add_option("--bind", b_binds, "variable binding NAME=0|1")->required();
  make_b->add_option("--out", b_out);

  // mechanism
  auto* mechanism = app.add_subcommand("mechanism", "run the bisection mechanism and print the trace as CSV");
  aos::mech::Environment env;
  double tol = 1e-9;
  mechanism->add_option("--a1", env.a1)->required();
  mechanism->add_option("--a2", env.a2)->required();
  mechanism->add_option("--b1", env.b1)->required();
  mechanism->add_option("--b2", env.b2)->required();
  mechanism->add_option("--seller-tau-min", env.seller_tau.min);
  mechanism->add_option("--seller-tau-max", env.seller_tau.max);
  mechanism->add_option("--buyer-tau-min", env.buyer_tau.min);
  mechanism->add_option("--buyer-tau-max", env.buyer_tau.max);
  mechanism->add_option("--tolerance", tol);

  // circuit
  auto* circuit = app.add_subcommand("circuit", "print a program as a Graphviz circuit");
  std::string c_program;
  circuit->add_option("--program", c_program)->required();

  CLI11_PARSE(app, argc, argv);
  // Logs go to stderr so stdout stays machine-readable JSON.
  spdlog::set_default_logger(spdlog::stderr_color_mt("aos"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*init) {
      auto cfg = load_config(init_config, init_dir);
      print(aos::node::cmd_init(cfg, init_seed.empty() ? std::nullopt : std::optional<std::string>(init_seed)));
    } else if (*run) {
      auto cfg = load_config(run_config, run_dir);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      aos::node::RunOptions opts;
      opts.max_height = max_height;
      opts.dp_epsilon = dp_epsilon;
      opts.linger_ms = linger_ms;
      opts.stop = &g_stop;
      const auto h = aos::node::cmd_run(cfg, opts);
      print({{"height", h}});
    } else if (*submit) {
      const json reply = aos::node::cmd_submit_tx(submit_to, load_sealed(submit_file));
      print(reply);
      if (reply.value("status", "") != "queued") return 1;
    } else if (*inspect) {
      aos::node::InspectQuery q;
      q.height = inspect_height;
      if (!inspect_tx.empty()) q.tx_id = aos::Digest::from_hex(inspect_tx);
      q.validate = inspect_validate;
      q.balances = inspect_balances;
      const json r = aos::node::cmd_inspect(resolve_data_dir(inspect_dir, {}), q);
      print(r);
      if (q.validate && !r.at("valid").get<bool>()) return 1;
    } else if (*simulate) {
      auto cfg = aos::netsim::load_sim_config(sim_config);
      if (sim_seed) cfg.seed = *sim_seed;
      if (!sim_trace.empty()) cfg.record_trace = true;
      const auto report = aos::netsim::run(cfg);
      if (!sim_trace.empty()) {
        std::ofstream out(sim_trace);
        report.write_trace(out);
      }
      print(report.summary());
      if (!report.safety_ok()) return 1;
    } else if (*keygen) {
      const auto k = keygen_seed.empty() ? aos::random_keypair() : aos::generate_keypair(keygen_seed);
      aos::node::write_json_file(keygen_out, aos::node::keypair_to_json(k));
      print({{"public_key", k.public_key.hex()}});
    } else if (*make_a) {
      const auto k = aos::node::load_keypair(a_key);
      const auto body = aos::tx::make_type_a(k.public_key, recipient_key(a_recipient),
                                             aos::txalgebra::parse(a_program), a_value);
      const auto signed_tx = aos::tx::sign(body, k.private_key);
      const auto sealed = aos::tx::seal(signed_tx, body.recipient);
      write_output(a_out, {{"tx_id", sealed.tx_id.hex()}, {"sealed", aos::tx::to_json_value(sealed)}});
    } else if (*make_b) {
      const auto k = aos::node::load_keypair(b_key);
      const auto target = aos::tx::open_and_verify(load_sealed(b_target), k.private_key);
      aos::txalgebra::Binding bindings;
      for (const auto& b : b_binds) {
        const auto eq = b.find('=');
        if (eq == std::string::npos || eq == 0 || (b.substr(eq + 1) != "0" && b.substr(eq + 1) != "1"))
          throw aos::Error(aos::Errc::Malformed, "binding must look like NAME=0 or NAME=1: " + b);
        bindings[b.substr(0, eq)] = b.substr(eq + 1) == "1";
      }
      const auto signed_tx = aos::tx::sign(aos::tx::make_type_b(target, std::move(bindings)), k.private_key);
      const auto sealed = aos::tx::seal(signed_tx, signed_tx.body.recipient);
      write_output(b_out, {{"tx_id", sealed.tx_id.hex()}, {"sealed", aos::tx::to_json_value(sealed)}});
    } else if (*mechanism) {
      const auto r = aos::mech::run_mechanism(env, tol);
      std::cout << "iteration,lambda,p1,p2\n";
      std::cout.precision(12);
      for (std::size_t i = 0; i < r.trace.size(); ++i)
        std::cout << i << ',' << r.trace[i].lambda << ',' << r.trace[i].p1 << ',' << r.trace[i].p2 << '\n';
      std::cerr << "lambda*=" << r.lambda_star << (r.no_crossing ? " (no crossing)" : "") << '\n';
    } else if (*circuit) {
      std::cout << aos::txalgebra::to_dot(aos::txalgebra::parse(c_program));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
