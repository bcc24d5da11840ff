#pragma once

#include "mdm/common.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mdm {

// The seven benchmarkable core services.
extern const std::vector<std::string> kBenchServices;

struct BenchConfig {
  uint64_t total_requests = 2000;  // per service
  uint64_t batch_size = 20;        // concurrent request workers
  std::vector<std::string> services; // empty: all seven
  int64_t block_interval_ms = 1000;
  uint64_t block_capacity = 200;
  std::string work_dir;            // fresh node state lives here
  int gateway_threads = 64;
};

struct ServiceStats {
  std::string service;
  bool is_read = false;
  uint64_t completed = 0;
  uint64_t errors = 0;
  double wall_s = 0;
  double tps = 0;      // completed / wall
  double p50_ms = 0;
  double p95_ms = 0;
  uint64_t height_before = 0; // chain height around the timed window
  uint64_t height_after = 0;
};

struct BenchReport {
  std::vector<ServiceStats> per_service;
  std::string environment;
  int64_t block_interval_ms = 0;
  uint64_t block_capacity = 0;
  nlohmann::json to_json() const;
};

// Spins up a fresh node and gateway with the configured chain parameters,
// pre-seeds per-service fixtures, then drives each selected service with
// total_requests requests from batch_size workers and reports throughput
// and latency percentiles. Errors are counted and excluded from completion.
// Throws Error("bad-config" | "gateway-unreachable" | "fixture-exhausted").
BenchReport run_bench(const BenchConfig& cfg);

// One row per service: name, tps, p50_ms, p95_ms, errors.
void emit_csv(const BenchReport& report, const std::string& path);

} // namespace mdm
