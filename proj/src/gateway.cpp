#include "mdm/gateway.hpp"

#include "mdm/api.hpp"

#include <httplib.h>

namespace mdm {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& detail = "") {
  json j;
  j["error"] = code;
  if (!detail.empty()) j["detail"] = detail;
  send_json(res, status, j);
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) {
    send_error(res, 400, "bad-request", "body is not valid JSON");
    return std::nullopt;
  }
  return j;
}

} // namespace

Gateway::Gateway(Node& node, GatewayConfig cfg) : node_(node), cfg_(std::move(cfg)) {
  grant_policy_ = [](const Agreement& agreement, const AccessRights& requested) {
    auto granted = AccessRights::from_csv(agreement.copyrights);
    return granted && granted->contains(requested);
  };
  server_ = std::make_unique<httplib::Server>();
  int threads = cfg_.worker_threads;
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<size_t>(threads)); };
  install_routes();
}

Gateway::~Gateway() { stop(); }

int Gateway::start() {
  if (cfg_.port == 0) {
    port_ = server_->bind_to_any_port(cfg_.host);
    if (port_ <= 0) throw Error("port-in-use", "cannot bind any port on " + cfg_.host);
  } else {
    if (!server_->bind_to_port(cfg_.host, cfg_.port))
      throw Error("port-in-use", cfg_.host + ":" + std::to_string(cfg_.port));
    port_ = cfg_.port;
  }
  serve_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Gateway::stop() {
  if (server_ && server_->is_running()) server_->stop();
  if (serve_thread_.joinable()) serve_thread_.join();
}

void Gateway::install_routes() {
  auto& svr = *server_;

  // ---- transaction endpoints ------------------------------------------
  // body: {"tx": <signed transaction>}; answers after the block lands
  auto run_tx = [this](const httplib::Request& req, httplib::Response& res,
                       const std::string& registry,
                       const std::string& op) -> std::optional<TxResult> {
    auto body = parse_body(req, res);
    if (!body) return std::nullopt;
    Transaction tx;
    try {
      tx = Transaction::from_json(body->at("tx"));
    } catch (const std::exception& e) {
      send_error(res, 400, "bad-request", e.what());
      return std::nullopt;
    }
    if (tx.registry != registry || tx.op != op) {
      send_error(res, 400, "wrong-target", "endpoint handles " + registry + "." + op);
      return std::nullopt;
    }
    TxResult r = node_.ledger().submit(std::move(tx))->wait();
    if (r.status == TxStatus::Rejected) {
      send_error(res, 400, r.reason);
      return std::nullopt;
    }
    return r;
  };
  auto respond_tx = [](httplib::Response& res, const TxResult& r) {
    json out;
    out["status"] = to_string(r.status);
    out["height"] = r.height;
    if (!r.reason.empty()) out["reason"] = r.reason;
    send_json(res, 200, out);
  };
  auto tx_endpoint = [run_tx, respond_tx](const std::string& registry, const std::string& op) {
    return [run_tx, respond_tx, registry, op](const httplib::Request& req,
                                              httplib::Response& res) {
      if (auto r = run_tx(req, res, registry, op)) respond_tx(res, *r);
    };
  };

  svr.Post("/did/register", tx_endpoint("did-registry", "register"));
  svr.Post("/did/update", tx_endpoint("did-registry", "update_ddo"));
  svr.Post("/did/revoke", tx_endpoint("did-registry", "revoke"));
  svr.Post("/agreement/generate", tx_endpoint("agreement-registry", "generate"));
  svr.Post("/agreement/owner-sign", tx_endpoint("agreement-registry", "owner_sign"));
  svr.Post("/agreement/provider-sign", tx_endpoint("agreement-registry", "provider_sign"));
  svr.Post("/media/register", tx_endpoint("multimedia-registry", "register"));
  svr.Post("/media/approve", tx_endpoint("multimedia-registry", "approve"));
  svr.Post("/media/log-access", tx_endpoint("multimedia-registry", "log_access"));

  // deregistration also drops the off-chain blob; the content hash must be
  // captured before the record is deleted
  svr.Post("/media/deregister", [this, run_tx, respond_tx](const httplib::Request& req,
                                                           httplib::Response& res) {
    std::optional<Hash32> blob;
    {
      json peek = json::parse(req.body, nullptr, false);
      if (!peek.is_discarded() && peek.contains("tx")) {
        try {
          auto args = MediaDeregisterArgs::decode(Transaction::from_json(peek["tx"]).payload);
          blob = node_.ledger().read([&](const Registries& s) -> std::optional<Hash32> {
            const MultimediaRecord* rec = s.multimedia.get(args.id);
            if (!rec) return std::nullopt;
            return rec->content_hash;
          });
        } catch (...) {
        }
      }
    }
    auto r = run_tx(req, res, "multimedia-registry", "deregister");
    if (!r) return;
    if (r->ok() && blob) {
      try {
        node_.store().remove(*blob);
      } catch (const Error&) {
        // blob was never uploaded or already gone
      }
    }
    respond_tx(res, *r);
  });

  // ---- read endpoints --------------------------------------------------
  svr.Get("/did/resolve", [this](const httplib::Request& req, httplib::Response& res) {
    std::string did = req.get_param_value("did");
    std::string err;
    auto ddo = node_.ledger().read(
        [&](const Registries& s) { return s.dids.resolve(did, &err); });
    if (!ddo) return send_error(res, err == "revoked" ? 410 : 404, err);
    json out;
    out["height"] = node_.ledger().height();
    out["did"] = did;
    out["ddo"] = *ddo;
    send_json(res, 200, out);
  });

  svr.Get("/did/record", [this](const httplib::Request& req, httplib::Response& res) {
    std::string did = req.get_param_value("did");
    json rec = node_.ledger().read([&](const Registries& s) -> json {
      const DidRecord* r = s.dids.record(did);
      return r ? s.dids.record_json(*r) : json();
    });
    if (rec.is_null()) return send_error(res, 404, "not-found");
    json out;
    out["height"] = node_.ledger().height();
    out["record"] = std::move(rec);
    send_json(res, 200, out);
  });

  svr.Get("/agreement/get", [this](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.get_param_value("id");
    json rec = node_.ledger().read([&](const Registries& s) -> json {
      const Agreement* a = s.agreements.get(id);
      return a ? s.agreements.record_json(*a) : json();
    });
    if (rec.is_null()) return send_error(res, 404, "not-found");
    json out;
    out["height"] = node_.ledger().height();
    out["agreement"] = std::move(rec);
    send_json(res, 200, out);
  });

  svr.Get("/media/record", [this](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.get_param_value("id");
    json rec = node_.ledger().read([&](const Registries& s) -> json {
      const MultimediaRecord* r = s.multimedia.get(id);
      return r ? s.multimedia.record_json(*r) : json();
    });
    if (rec.is_null()) return send_error(res, 404, "not-found");
    json out;
    out["height"] = node_.ledger().height();
    out["record"] = std::move(rec);
    send_json(res, 200, out);
  });

  svr.Get("/media/access-log", [this](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.get_param_value("id");
    auto log = node_.ledger().read([&](const Registries& s) -> std::optional<json> {
      const MultimediaRecord* r = s.multimedia.get(id);
      if (!r) return std::nullopt;
      json arr = json::array();
      for (const auto& cert : r->access_log) arr.push_back(to_hex(cert));
      return arr;
    });
    if (!log) return send_error(res, 404, "not-found");
    json out;
    out["height"] = node_.ledger().height();
    out["id"] = id;
    out["access_log"] = std::move(*log);
    send_json(res, 200, out);
  });

  svr.Get("/chain/tip", [this](const httplib::Request&, httplib::Response& res) {
    json out;
    out["height"] = node_.ledger().height();
    out["state_root"] = to_hex(node_.ledger().tip_state_root());
    out["block_hash"] = to_hex(node_.ledger().tip_block_hash());
    out["timestamp_ms"] = node_.ledger().last_block_time_ms();
    send_json(res, 200, out);
  });

  svr.Get("/chain/nonce", [this](const httplib::Request& req, httplib::Response& res) {
    auto addr = from_hex_fixed<20>(req.get_param_value("account"));
    if (!addr) return send_error(res, 400, "bad-request", "account must be 40 hex chars");
    json out;
    out["account"] = to_hex(*addr);
    out["next_nonce"] = node_.ledger().expected_nonce(*addr);
    send_json(res, 200, out);
  });

  svr.Get("/chain/query", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      json value = node_.ledger().query(req.get_param_value("registry"),
                                        req.get_param_value("key"));
      json out;
      out["height"] = node_.ledger().height();
      out["value"] = std::move(value);
      send_json(res, 200, out);
    } catch (const Error& e) {
      send_error(res, e.code() == "unknown-registry" ? 400 : 404, e.code());
    }
  });

  // ---- off-chain store -------------------------------------------------
  svr.Post("/store/upload", [this](const httplib::Request& req, httplib::Response& res) {
    auto env = parse_body(req, res);
    if (!env) return;
    json body;
    std::string err;
    auto caller = verify_envelope(*env, &body, &err);
    if (!caller) return send_error(res, 401, err);
    auto data = base64url_decode(body.value("data", ""));
    if (!data || data->empty()) return send_error(res, 400, "bad-request", "missing data");
    std::string kind = body.value("kind", "multimedia-source");
    if (kind != "multimedia-source" && kind != "agreement-document" && kind != "token-copy")
      return send_error(res, 400, "bad-request", "unknown media kind");
    Hash32 hash = node_.store().put(*data, kind);
    json out;
    out["content_hash"] = to_hex(hash);
    out["locator"] = locator_for(hash);
    send_json(res, 200, out);
  });

  // ---- access management ----------------------------------------------
  svr.Post("/access/token", [this](const httplib::Request& req, httplib::Response& res) {
    auto env = parse_body(req, res);
    if (!env) return;
    json body;
    std::string err;
    auto caller = verify_envelope(*env, &body, &err);
    if (!caller) return send_error(res, 401, err);

    std::string enduser_did = body.value("enduser_did", "");
    std::string multimedia_id = body.value("multimedia_id", "");
    int64_t duration_ms = body.value("duration_ms", int64_t{0});
    std::vector<std::string> right_names;
    if (body.contains("rights") && body["rights"].is_array())
      for (const auto& r : body["rights"]) right_names.push_back(r.get<std::string>());
    auto rights = AccessRights::from_names(right_names);
    if (!rights || rights->empty()) return send_error(res, 400, "empty-rights");
    if (duration_ms <= 0) return send_error(res, 400, "expired-window", "duration must be > 0");

    // the caller must control the end-user DID it requests for
    struct Ctx {
      std::string owner_did, provider_did, endpoint;
      Address provider_account{};
      Hash32 agreement_hash{};
      bool enduser_ok = false, media_ok = false;
      Agreement agreement;
      bool agreement_ok = false;
    } ctx;
    node_.ledger().read([&](const Registries& s) {
      const DidRecord* enduser = s.dids.record(enduser_did);
      if (enduser && !enduser->revoked && enduser->owner == *caller) {
        ctx.enduser_ok = true;
        if (auto doc = DidDocument::parse(enduser->ddo))
          if (!doc->services.empty()) ctx.endpoint = doc->services.front().endpoint;
      }
      const MultimediaRecord* rec = s.multimedia.get(multimedia_id);
      if (rec && rec->approved) {
        ctx.media_ok = true;
        ctx.owner_did = rec->owner_did;
        ctx.provider_did = rec->provider_did;
        ctx.provider_account = rec->provider_account;
        ctx.agreement_hash = rec->agreement_hash;
        if (const Agreement* a = s.agreements.find_settled_by_hash(rec->agreement_hash)) {
          ctx.agreement = *a;
          ctx.agreement_ok = true;
        }
      }
      return 0;
    });
    if (!ctx.enduser_ok) return send_error(res, 403, "unknown-enduser");
    if (!ctx.media_ok) return send_error(res, 404, "not-approved");
    if (!ctx.agreement_ok) return send_error(res, 409, "agreement-not-settled");
    if (!grant_policy_(ctx.agreement, *rights))
      return send_error(res, 403, "rights-not-granted", "requested rights exceed the agreement");

    auto provider = node_.keystore().find_by_address(ctx.provider_account);
    if (!provider)
      return send_error(res, 503, "no-provider-key",
                        "this gateway cannot grant for the work's provider");

    int64_t now = now_ms();
    ValidTime window{body.value("not_before_ms", now), 0};
    window.not_after_ms = window.not_before_ms + duration_ms;
    try {
      auto grant = node_.tokens().generate(provider->account, ctx.owner_did, ctx.provider_did,
                                           enduser_did, multimedia_id, *rights, window, now);
      json out;
      out["status"] = "ok";
      out["height"] = grant.issue_tx->wait().height;
      out["token"] = grant.encoded;
      out["cert_id"] = to_hex(grant.cert_id);
      out["delivery"] = ctx.endpoint.empty()
                            ? "token returned in response; end user has no contact endpoint"
                            : "token returned in response; contact endpoint: " + ctx.endpoint;
      send_json(res, 200, out);
    } catch (const Error& e) {
      send_error(res, 409, e.code(), e.what());
    }
  });

  // verification is a query over hostile input: always 200, outcome in body
  svr.Post("/access/verify", [this](const httplib::Request& req, httplib::Response& res) {
    std::string token;
    json j = json::parse(req.body, nullptr, false);
    if (!j.is_discarded() && j.is_object()) token = j.value("token", "");
    VerificationReport report = node_.tokens().verify(token, now_ms());
    json out = report.to_json();
    out["height"] = node_.ledger().height();
    send_json(res, 200, out);
  });

  svr.Post("/access/redeem", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req, res);
    if (!body) return;
    std::string token = body->value("token", "");
    try {
      Bytes content = node_.tokens().redeem(token, now_ms());
      res.status = 200;
      res.set_header("X-Content-Hash", to_hex(sha256(content)));
      res.set_content(std::string(content.begin(), content.end()),
                      "application/octet-stream");
    } catch (const Error& e) {
      int status = e.code() == "verification-failed" ? 403
                   : e.code() == "content-missing"   ? 404
                                                     : 500;
      send_error(res, status, e.code(), e.what());
    }
  });

  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                               std::exception_ptr ep) {
    std::string detail = "unhandled exception";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      detail = e.what();
    } catch (...) {
    }
    send_error(res, 500, "internal", detail);
  });
}

} // namespace mdm
