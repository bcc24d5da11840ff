#include "mdm/bench.hpp"

#include "mdm/client.hpp"
#include "mdm/did.hpp"
#include "mdm/gateway.hpp"
#include "mdm/node.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <latch>
#include <thread>

namespace mdm {

using nlohmann::json;

const std::vector<std::string> kBenchServices = {
    "did-registration",       "did-resolution",          "agreement-generation",
    "multimedia-registration", "multimedia-deregistration", "token-generation",
    "token-verification",
};

namespace {

constexpr const char* kBenchRights = "broadcasting,performance,publication";

double percentile(std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0;
  size_t idx = static_cast<size_t>(p * double(sorted.size() - 1));
  return sorted[idx];
}

struct TimedResult {
  std::vector<double> latencies_ms;
  uint64_t errors = 0;
  double wall_s = 0;
};

// batch_size workers, worker w statically owns indices [w*per, (w+1)*per).
TimedResult run_timed(const std::string& host, int port, uint64_t total, uint64_t batch,
                      const std::function<void(size_t, GatewayClient&)>& prepare,
                      const std::function<bool(size_t, uint64_t, GatewayClient&)>& request) {
  TimedResult result;
  if (total == 0) return result;
  uint64_t per = total / batch;

  std::vector<std::vector<double>> lat(batch);
  std::vector<uint64_t> errs(batch, 0);
  std::vector<std::exception_ptr> fatal(batch);
  std::latch ready(static_cast<ptrdiff_t>(batch));
  std::latch go(1);

  std::vector<std::thread> workers;
  for (uint64_t w = 0; w < batch; ++w) {
    workers.emplace_back([&, w] {
      try {
        GatewayClient client(host, port);
        if (prepare) prepare(w, client);
        lat[w].reserve(per);
        ready.count_down();
        go.wait();
        for (uint64_t i = w * per; i < (w + 1) * per; ++i) {
          auto t0 = std::chrono::steady_clock::now();
          bool ok = false;
          try {
            ok = request(w, i, client);
          } catch (const std::exception& e) {
            if (errs[w] == 0 && std::getenv("MDM_BENCH_DEBUG"))
              std::fprintf(stderr, "bench request error (worker %zu, i %llu): %s\n", size_t(w),
                           static_cast<unsigned long long>(i), e.what());
            ok = false;
          }
          auto t1 = std::chrono::steady_clock::now();
          if (ok)
            lat[w].push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
          else
            ++errs[w];
        }
      } catch (...) {
        fatal[w] = std::current_exception();
        ready.count_down();
      }
    });
  }
  ready.wait();
  auto t0 = std::chrono::steady_clock::now();
  go.count_down();
  for (auto& t : workers) t.join();
  auto t1 = std::chrono::steady_clock::now();
  for (auto& f : fatal)
    if (f) std::rethrow_exception(f);

  for (uint64_t w = 0; w < batch; ++w) {
    result.latencies_ms.insert(result.latencies_ms.end(), lat[w].begin(), lat[w].end());
    result.errors += errs[w];
  }
  result.wall_s = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

// Seeding runs against the node directly, before the sealer starts, so
// fixtures land at full block capacity instead of one wall-clock interval
// per round trip.
class Seeder {
public:
  explicit Seeder(Node& node) : node_(node) {}

  void submit(const Account& from, const std::string& registry, const std::string& op,
              Bytes payload) {
    Transaction tx = Transaction::make_signed(from, node_.ledger().expected_nonce(from.address),
                                              registry, op, std::move(payload));
    handles_.push_back(node_.ledger().submit(std::move(tx)));
  }

  void flush() {
    node_.drain_pool();
    for (auto& h : handles_) {
      auto r = h->poll();
      if (!r || !r->ok())
        throw Error("fixture-exhausted",
                    "fixture transaction failed: " + (r ? r->reason : "still pending"));
    }
    handles_.clear();
  }

  Account new_identity(const std::string& label, std::string* did_out) {
    Account acc = Account::generate();
    std::string did = did_for_address(acc.address);
    std::string ddo = make_ddo(did, acc.public_key, "https://bench.invalid/" + label).canonical();
    submit(acc, "did-registry", "register", DidRegisterArgs{acc.address, did, ddo}.encode());
    if (did_out) *did_out = did;
    return acc;
  }

private:
  Node& node_;
  std::vector<std::shared_ptr<TxHandle>> handles_;
};

struct Fixtures {
  // did-registration: fresh identities signed up during the timed phase
  std::vector<Account> reg_accounts;
  std::vector<std::string> reg_dids, reg_ddos;
  // did-resolution
  std::vector<std::string> resolve_dids;
  // agreement-generation: one owner, one drafting provider per worker
  Account agr_owner;
  std::string agr_owner_did;
  std::vector<Account> agr_providers;
  std::vector<std::string> agr_provider_dids;
  // multimedia-registration: one owner per worker
  std::vector<Account> medreg_owners;
  std::vector<std::string> medreg_owner_dids;
  // multimedia-deregistration: pre-registered works, one owner per worker
  std::vector<Account> meddel_owners;
  // token-generation: per worker one approved work under its own provider
  Account tok_enduser;
  std::string tok_enduser_did;
  std::string tok_owner_did;
  std::vector<std::string> tok_media_ids;
  // token-verification
  std::vector<std::string> verify_tokens;
};

bool selected(const BenchConfig& cfg, const std::string& service) {
  if (cfg.services.empty()) return true;
  return std::find(cfg.services.begin(), cfg.services.end(), service) != cfg.services.end();
}

// One settled agreement between owner and provider plus an approved work.
void seed_approved_media(Seeder& seeder, Node& node, const Account& owner,
                         const std::string& owner_did, const Account& provider,
                         const std::string& provider_did, const std::string& media_id,
                         const std::string& agreement_id) {
  Hash32 content_hash = sha256("bench content for " + media_id);
  MediaRegisterArgs reg;
  reg.id = media_id;
  reg.owner_did = owner_did;
  reg.content_hash = content_hash;
  reg.owner_sig = sign(owner.secret_key,
                       std::span<const uint8_t>(content_hash.data(), content_hash.size()));
  reg.upload_ref = locator_for(content_hash);
  seeder.submit(owner, "multimedia-registry", "register", reg.encode());

  AgreementGenerateArgs agr;
  agr.id = agreement_id;
  agr.owner_did = owner_did;
  agr.owner_account = owner.address;
  agr.provider_did = provider_did;
  agr.agreement_hash = sha256("agreement for " + media_id);
  agr.valid_time_s = 365 * 24 * 3600;
  agr.copyrights = kBenchRights;
  seeder.submit(provider, "agreement-registry", "generate", agr.encode());

  Bytes msg = agreement_signing_bytes(agr.id, agr.owner_did, agr.provider_did,
                                      agr.agreement_hash, agr.valid_time_s, agr.copyrights);
  seeder.submit(owner, "agreement-registry", "owner_sign",
                AgreementSignArgs{agr.id, sign(owner.secret_key, msg)}.encode());
  seeder.submit(provider, "agreement-registry", "provider_sign",
                AgreementSignArgs{agr.id, sign(provider.secret_key, msg)}.encode());
  seeder.flush();

  MediaApproveArgs app;
  app.id = media_id;
  app.provider_did = provider_did;
  app.agreement_hash = agr.agreement_hash;
  seeder.submit(provider, "multimedia-registry", "approve", app.encode());
  seeder.flush();

  // the store must serve approved works
  node.store().put(to_bytes("bench content for " + media_id), "multimedia-source");
}

Fixtures seed_fixtures(const BenchConfig& cfg, Node& node) {
  Fixtures fx;
  Seeder seeder(node);
  uint64_t batch = cfg.batch_size;

  if (selected(cfg, "did-registration")) {
    fx.reg_accounts.reserve(cfg.total_requests);
    for (uint64_t i = 0; i < cfg.total_requests; ++i) {
      Account acc = Account::generate();
      std::string did = did_for_address(acc.address);
      fx.reg_dids.push_back(did);
      fx.reg_ddos.push_back(make_ddo(did, acc.public_key).canonical());
      fx.reg_accounts.push_back(std::move(acc));
    }
  }

  if (selected(cfg, "did-resolution")) {
    uint64_t pool = std::min<uint64_t>(std::max<uint64_t>(cfg.total_requests, 1), 100);
    for (uint64_t i = 0; i < pool; ++i) {
      std::string did;
      seeder.new_identity("resolve-" + std::to_string(i), &did);
      fx.resolve_dids.push_back(did);
    }
    seeder.flush();
  }

  if (selected(cfg, "agreement-generation")) {
    fx.agr_owner = seeder.new_identity("agr-owner", &fx.agr_owner_did);
    for (uint64_t w = 0; w < batch; ++w) {
      std::string did;
      fx.agr_providers.push_back(seeder.new_identity("agr-provider-" + std::to_string(w), &did));
      fx.agr_provider_dids.push_back(did);
    }
    seeder.flush();
  }

  if (selected(cfg, "multimedia-registration")) {
    for (uint64_t w = 0; w < batch; ++w) {
      std::string did;
      fx.medreg_owners.push_back(seeder.new_identity("medreg-owner-" + std::to_string(w), &did));
      fx.medreg_owner_dids.push_back(did);
    }
    seeder.flush();
  }

  if (selected(cfg, "multimedia-deregistration")) {
    std::vector<std::string> dids(batch);
    for (uint64_t w = 0; w < batch; ++w)
      fx.meddel_owners.push_back(seeder.new_identity("meddel-owner-" + std::to_string(w), &dids[w]));
    seeder.flush();
    uint64_t per = cfg.total_requests / batch;
    for (uint64_t w = 0; w < batch; ++w) {
      for (uint64_t i = w * per; i < (w + 1) * per; ++i) {
        Hash32 h = sha256("deletable " + std::to_string(i));
        MediaRegisterArgs reg;
        reg.id = "med-del-" + std::to_string(i);
        reg.owner_did = dids[w];
        reg.content_hash = h;
        reg.owner_sig =
            sign(fx.meddel_owners[w].secret_key, std::span<const uint8_t>(h.data(), h.size()));
        reg.upload_ref = locator_for(h);
        seeder.submit(fx.meddel_owners[w], "multimedia-registry", "register", reg.encode());
      }
    }
    seeder.flush();
  }

  if (selected(cfg, "token-generation")) {
    fx.tok_enduser = seeder.new_identity("tok-enduser", &fx.tok_enduser_did);
    Account owner = seeder.new_identity("tok-owner", &fx.tok_owner_did);
    seeder.flush();
    for (uint64_t w = 0; w < batch; ++w) {
      std::string provider_did;
      Account provider = seeder.new_identity("tok-provider-" + std::to_string(w), &provider_did);
      seeder.flush();
      std::string media_id = "med-tok-" + std::to_string(w);
      seed_approved_media(seeder, node, owner, fx.tok_owner_did, provider, provider_did,
                          media_id, "agr-tok-" + std::to_string(w));
      fx.tok_media_ids.push_back(media_id);
      // the gateway grants under the provider's authority
      KeystoreEntry entry;
      entry.name = "bench-provider-" + std::to_string(w);
      entry.did = provider_did;
      entry.account = provider;
      node.keystore().save(entry);
    }
  }

  if (selected(cfg, "token-verification")) {
    std::string enduser_did, owner_did, provider_did;
    seeder.new_identity("ver-enduser", &enduser_did);
    Account owner = seeder.new_identity("ver-owner", &owner_did);
    Account provider = seeder.new_identity("ver-provider", &provider_did);
    seeder.flush();
    seed_approved_media(seeder, node, owner, owner_did, provider, provider_did, "med-ver",
                        "agr-ver");
    uint64_t pool = std::min<uint64_t>(std::max<uint64_t>(cfg.total_requests, 1), 500);
    auto rights = AccessRights::from_csv(kBenchRights).value();
    int64_t now = now_ms();
    std::vector<TokenEngine::Grant> grants;
    for (uint64_t i = 0; i < pool; ++i) {
      ValidTime window{now, now + 6 * 3600 * 1000 + static_cast<int64_t>(i)};
      grants.push_back(node.tokens().generate(provider, owner_did, provider_did, enduser_did,
                                              "med-ver", rights, window, now, false));
    }
    node.drain_pool();
    for (auto& g : grants) {
      auto r = g.issue_tx->poll();
      if (!r || !r->ok()) throw Error("fixture-exhausted", "token fixture issuance failed");
      fx.verify_tokens.push_back(g.encoded);
    }
  }

  return fx;
}

} // namespace

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.batch_size == 0) throw Error("bad-config", "batch size must be > 0");
  if (cfg.total_requests % cfg.batch_size != 0)
    throw Error("bad-config", "total requests must be divisible by batch size");
  for (const auto& s : cfg.services)
    if (std::find(kBenchServices.begin(), kBenchServices.end(), s) == kBenchServices.end())
      throw Error("bad-config", "unknown service " + s);

  NodeConfig node_cfg;
  node_cfg.chain.block_interval_ms = cfg.block_interval_ms;
  node_cfg.chain.block_capacity = cfg.block_capacity;
  node_cfg.chain.data_dir = cfg.work_dir;
  Node node(node_cfg);

  Fixtures fx = seed_fixtures(cfg, node);

  node.start_sealer();
  Gateway gateway(node, GatewayConfig{"127.0.0.1", 0, cfg.gateway_threads});
  int port = gateway.start();
  const std::string host = "127.0.0.1";

  BenchReport report;
  report.block_interval_ms = cfg.block_interval_ms;
  report.block_capacity = cfg.block_capacity;
  report.environment = "embedded node, loopback http, " +
                       std::to_string(std::thread::hardware_concurrency()) + " hw threads, " +
                       std::to_string(cfg.batch_size) + " workers";

  uint64_t total = cfg.total_requests;
  uint64_t batch = cfg.batch_size;
  uint64_t per = batch ? total / batch : 0;

  for (const auto& service : kBenchServices) {
    if (!selected(cfg, service)) continue;

    ServiceStats stats;
    stats.service = service;
    stats.is_read = service == "did-resolution" || service == "token-verification";
    stats.height_before = node.ledger().height();

    std::function<void(size_t, GatewayClient&)> prepare;
    std::function<bool(size_t, uint64_t, GatewayClient&)> request;
    std::vector<uint64_t> nonces(batch, 0);

    if (service == "did-registration") {
      request = [&](size_t, uint64_t i, GatewayClient& client) {
        Transaction tx =
            Transaction::make_signed(fx.reg_accounts[i], 1, "did-registry", "register",
                                     DidRegisterArgs{fx.reg_accounts[i].address, fx.reg_dids[i],
                                                     fx.reg_ddos[i]}
                                         .encode());
        return client.submit_tx("/did/register", tx).ok();
      };
    } else if (service == "did-resolution") {
      request = [&](size_t, uint64_t i, GatewayClient& client) {
        return client.did_resolve(fx.resolve_dids[i % fx.resolve_dids.size()]).has_value();
      };
    } else if (service == "agreement-generation") {
      prepare = [&](size_t w, GatewayClient& client) {
        nonces[w] = client.next_nonce(fx.agr_providers[w].address);
      };
      request = [&](size_t w, uint64_t i, GatewayClient& client) {
        AgreementGenerateArgs args;
        args.id = "agr-bench-" + std::to_string(i);
        args.owner_did = fx.agr_owner_did;
        args.owner_account = fx.agr_owner.address;
        args.provider_did = fx.agr_provider_dids[w];
        args.agreement_hash = sha256(args.id);
        args.valid_time_s = 3600;
        args.copyrights = kBenchRights;
        Transaction tx = Transaction::make_signed(fx.agr_providers[w], nonces[w]++,
                                                  "agreement-registry", "generate", args.encode());
        return client.submit_tx("/agreement/generate", tx).ok();
      };
    } else if (service == "multimedia-registration") {
      prepare = [&](size_t w, GatewayClient& client) {
        nonces[w] = client.next_nonce(fx.medreg_owners[w].address);
      };
      request = [&](size_t w, uint64_t i, GatewayClient& client) {
        Hash32 h = sha256("bench-media-" + std::to_string(i));
        MediaRegisterArgs args;
        args.id = "med-reg-" + std::to_string(i);
        args.owner_did = fx.medreg_owner_dids[w];
        args.content_hash = h;
        args.owner_sig = sign(fx.medreg_owners[w].secret_key,
                              std::span<const uint8_t>(h.data(), h.size()));
        args.upload_ref = locator_for(h);
        Transaction tx = Transaction::make_signed(fx.medreg_owners[w], nonces[w]++,
                                                  "multimedia-registry", "register",
                                                  args.encode());
        return client.submit_tx("/media/register", tx).ok();
      };
    } else if (service == "multimedia-deregistration") {
      prepare = [&](size_t w, GatewayClient& client) {
        nonces[w] = client.next_nonce(fx.meddel_owners[w].address);
      };
      request = [&](size_t w, uint64_t i, GatewayClient& client) {
        Transaction tx = Transaction::make_signed(
            fx.meddel_owners[w], nonces[w]++, "multimedia-registry", "deregister",
            MediaDeregisterArgs{"med-del-" + std::to_string(i)}.encode());
        return client.submit_tx("/media/deregister", tx).ok();
      };
    } else if (service == "token-generation") {
      request = [&](size_t w, uint64_t i, GatewayClient& client) {
        // distinct validity window per request keeps certificate ids unique
        json res = client.request_access(fx.tok_enduser, fx.tok_enduser_did, fx.tok_media_ids[w],
                                         {"publication", "broadcasting"},
                                         3600 * 1000 + static_cast<int64_t>(i));
        return res.value("status", "") == "ok";
      };
    } else if (service == "token-verification") {
      if (total > 0 && fx.verify_tokens.empty())
        throw Error("fixture-exhausted", "no tokens to verify");
      request = [&](size_t, uint64_t i, GatewayClient& client) {
        json res = client.verify_token(fx.verify_tokens[i % fx.verify_tokens.size()]);
        return res.value("accepted", false);
      };
    }

    TimedResult timed = run_timed(host, port, per * batch, batch, prepare, request);
    stats.completed = timed.latencies_ms.size();
    stats.errors = timed.errors;
    stats.wall_s = timed.wall_s;
    stats.tps = timed.wall_s > 0 ? double(stats.completed) / timed.wall_s : 0;
    std::sort(timed.latencies_ms.begin(), timed.latencies_ms.end());
    stats.p50_ms = percentile(timed.latencies_ms, 0.50);
    stats.p95_ms = percentile(timed.latencies_ms, 0.95);
    stats.height_after = node.ledger().height();
    report.per_service.push_back(std::move(stats));
  }

  gateway.stop();
  node.stop_sealer();
  return report;
}

json BenchReport::to_json() const {
  json rows = json::array();
  for (const auto& s : per_service) {
    json r;
    r["service"] = s.service;
    r["is_read"] = s.is_read;
    r["completed"] = s.completed;
    r["errors"] = s.errors;
    r["wall_s"] = s.wall_s;
    r["tps"] = s.tps;
    r["p50_ms"] = s.p50_ms;
    r["p95_ms"] = s.p95_ms;
    r["height_before"] = s.height_before;
    r["height_after"] = s.height_after;
    rows.push_back(std::move(r));
  }
  json j;
  j["environment"] = environment;
  j["block_interval_ms"] = block_interval_ms;
  j["block_capacity"] = block_capacity;
  j["services"] = std::move(rows);
  return j;
}

void emit_csv(const BenchReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path);
  out << "service,tps,p50_ms,p95_ms,errors\n";
  for (const auto& s : report.per_service)
    out << s.service << "," << s.tps << "," << s.p50_ms << "," << s.p95_ms << "," << s.errors
        << "\n";
}

} // namespace mdm
