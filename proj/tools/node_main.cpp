// Platform node daemon: embedded ledger + off-chain store behind the HTTP
// gateway.

#include "mdm/gateway.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iostream>

namespace {
std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop.store(true); }
} // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdm-node: multimedia data management platform node"};

  std::string config_path;
  std::string data_dir = "mdm-data";
  int64_t block_interval_ms = 1000;
  uint64_t block_capacity = 200;
  std::string host = "127.0.0.1";
  int port = 8545;
  int threads = 64;

  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--data-dir", data_dir, "chain, store and keystore directory");
  app.add_option("--block-interval-ms", block_interval_ms, "sealing interval");
  app.add_option("--block-capacity", block_capacity, "weight units per block");
  app.add_option("--host", host, "listen address");
  app.add_option("--port", port, "listen port");
  app.add_option("--threads", threads, "gateway worker threads");
  CLI11_PARSE(app, argc, argv);

  try {
    mdm::NodeConfig cfg;
    if (!config_path.empty()) cfg = mdm::NodeConfig::from_file(config_path);
    if (app.count("--data-dir") || cfg.chain.data_dir.empty()) cfg.chain.data_dir = data_dir;
    if (app.count("--block-interval-ms")) cfg.chain.block_interval_ms = block_interval_ms;
    if (app.count("--block-capacity")) cfg.chain.block_capacity = block_capacity;

    mdm::Node node(cfg);
    node.start_sealer();
    mdm::Gateway gateway(node, {host, port, threads});
    int bound = gateway.start();
    std::cout << "listening on " << host << ":" << bound << " (chain height "
              << node.ledger().height() << ", interval " << cfg.chain.block_interval_ms
              << " ms, capacity " << cfg.chain.block_capacity << ")" << std::endl;

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));

    gateway.stop();
    node.stop_sealer();
    std::cout << "stopped at height " << node.ledger().height() << std::endl;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
