// Throughput benchmark: drives the seven core services against a fresh
// embedded node and reports tps and latency percentiles per service.

#include "mdm/bench.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"mdm-bench: per-service throughput measurement"};

  mdm::BenchConfig cfg;
  std::string csv_path = "bench-report.csv";
  std::string json_path;
  cfg.work_dir = "mdm-bench-data";

  app.add_option("--requests", cfg.total_requests, "requests per service")
      ->capture_default_str();
  app.add_option("--batch", cfg.batch_size, "concurrent request workers")->capture_default_str();
  app.add_option("--services", cfg.services,
                 "subset of: did-registration did-resolution agreement-generation "
                 "multimedia-registration multimedia-deregistration token-generation "
                 "token-verification (default: all)");
  app.add_option("--block-interval-ms", cfg.block_interval_ms, "sealing interval")
      ->capture_default_str();
  app.add_option("--block-capacity", cfg.block_capacity, "weight units per block")
      ->capture_default_str();
  app.add_option("--work-dir", cfg.work_dir, "scratch directory (wiped before the run)")
      ->capture_default_str();
  app.add_option("--csv", csv_path, "CSV report path")->capture_default_str();
  app.add_option("--json", json_path, "also write the full JSON report here");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::remove_all(cfg.work_dir);
    mdm::BenchReport report = mdm::run_bench(cfg);

    std::cout << "service,tps,p50_ms,p95_ms,errors\n";
    for (const auto& s : report.per_service)
      std::cout << s.service << "," << s.tps << "," << s.p50_ms << "," << s.p95_ms << ","
                << s.errors << "\n";
    mdm::emit_csv(report, csv_path);
    std::cout << "csv written to " << csv_path << std::endl;
    if (!json_path.empty()) {
      std::ofstream out(json_path);
      out << report.to_json().dump(2) << std::endl;
      std::cout << "json written to " << json_path << std::endl;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
