// Command-line client for the three platform roles: key and DID management,
// multimedia registration, agreement signing, approval, access requests,
// token verification and content redemption. All signing happens here with
// local keystore keys; only signed transactions and envelopes go out.

#include "mdm/client.hpp"
#include "mdm/did.hpp"
#include "mdm/keystore.hpp"
#include "mdm/token.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using nlohmann::json;

namespace {

struct Ctx {
  std::string gateway_host = "127.0.0.1";
  int gateway_port = 8545;
  std::string keystore_dir = "keystore";
  bool json_output = false;
};

void emit(const Ctx& ctx, const json& j, const std::string& human) {
  if (ctx.json_output)
    std::cout << j.dump() << std::endl;
  else
    std::cout << human << std::endl;
}

[[noreturn]] void die(const Ctx& ctx, const std::string& code, const std::string& detail = "") {
  if (ctx.json_output) {
    json j;
    j["error"] = code;
    if (!detail.empty()) j["detail"] = detail;
    std::cout << j.dump() << std::endl;
  } else {
    std::cerr << "error: " << code << (detail.empty() ? "" : " (" + detail + ")") << std::endl;
  }
  std::exit(1);
}

mdm::KeystoreEntry need_identity(const Ctx& ctx, const std::string& name) {
  mdm::Keystore ks(ctx.keystore_dir);
  auto e = ks.load(name);
  if (!e) die(ctx, "unknown-identity", name + " not in " + ctx.keystore_dir);
  return *e;
}

mdm::Bytes read_file(const Ctx& ctx, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(ctx, "cannot-read", path);
  return mdm::Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const Ctx& ctx, const std::string& path, const mdm::Bytes& data) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) die(ctx, "cannot-write", path);
}

std::string load_token_arg(const Ctx& ctx, const std::string& token,
                           const std::string& token_file) {
  if (!token.empty()) return token;
  if (token_file.empty()) die(ctx, "missing-token", "pass --token or --token-file");
  auto bytes = read_file(ctx, token_file);
  std::string t(bytes.begin(), bytes.end());
  while (!t.empty() && (t.back() == '\n' || t.back() == '\r')) t.pop_back();
  return t;
}

mdm::GatewayClient connect(const Ctx& ctx) {
  return mdm::GatewayClient(ctx.gateway_host, ctx.gateway_port);
}

void report_write(const Ctx& ctx, const mdm::WriteResult& r, const std::string& what) {
  json j;
  j["status"] = r.status;
  j["height"] = r.height;
  if (!r.reason.empty()) j["reason"] = r.reason;
  emit(ctx, j,
       what + ": " + r.status + (r.reason.empty() ? "" : " (" + r.reason + ")") +
           " at height " + std::to_string(r.height));
  if (!r.ok()) std::exit(1);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdm: client for the multimedia data management platform"};
  app.require_subcommand(1);

  Ctx ctx;
  app.add_option("--gateway-host", ctx.gateway_host)->capture_default_str();
  app.add_option("--gateway-port", ctx.gateway_port)->capture_default_str();
  app.add_option("--keystore", ctx.keystore_dir, "directory holding identity key files")
      ->capture_default_str();
  app.add_flag("--json", ctx.json_output, "machine-readable output");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "create a local identity key file");
  std::string kg_name, kg_did;
  keygen->add_option("--name", kg_name)->required();
  keygen->add_option("--did", kg_did, "override the default did:mdm:<address>");

  // did-register
  auto* did_register = app.add_subcommand("did-register", "register the identity's DID");
  std::string dr_name, dr_endpoint;
  did_register->add_option("--as", dr_name)->required();
  did_register->add_option("--endpoint", dr_endpoint, "contact service endpoint for the DDO");

  // did-resolve
  auto* did_resolve = app.add_subcommand("did-resolve", "fetch a DID document");
  std::string dres_did;
  did_resolve->add_option("--did", dres_did)->required();

  // did-update
  auto* did_update = app.add_subcommand("did-update", "replace the DDO (new endpoint)");
  std::string du_name, du_endpoint;
  did_update->add_option("--as", du_name)->required();
  did_update->add_option("--endpoint", du_endpoint)->required();

  // did-revoke
  auto* did_revoke = app.add_subcommand("did-revoke", "revoke the identity's DID");
  std::string drv_name;
  did_revoke->add_option("--as", drv_name)->required();

  // media-register
  auto* media_register =
      app.add_subcommand("media-register", "hash + upload a file, sign it, register on-chain");
  std::string mr_name, mr_id, mr_file;
  media_register->add_option("--as", mr_name)->required();
  media_register->add_option("--id", mr_id)->required();
  media_register->add_option("--file", mr_file)->required();

  // agreement-generate
  auto* agreement_generate =
      app.add_subcommand("agreement-generate", "draft the licensing agreement on-chain");
  std::string ag_name, ag_id, ag_owner_did, ag_file, ag_rights = "publication";
  uint64_t ag_valid_s = 365 * 24 * 3600;
  agreement_generate->add_option("--as", ag_name, "drafting provider identity")->required();
  agreement_generate->add_option("--id", ag_id)->required();
  agreement_generate->add_option("--owner-did", ag_owner_did)->required();
  agreement_generate->add_option("--file", ag_file, "agreement document")->required();
  agreement_generate->add_option("--valid-seconds", ag_valid_s)->capture_default_str();
  agreement_generate->add_option("--copyrights", ag_rights, "comma-joined right names")
      ->capture_default_str();

  // agreement-sign
  auto* agreement_sign = app.add_subcommand("agreement-sign", "sign an agreement as a party");
  std::string as_name, as_id, as_role;
  agreement_sign->add_option("--as", as_name)->required();
  agreement_sign->add_option("--id", as_id)->required();
  agreement_sign->add_option("--role", as_role, "owner | provider")->required();

  // media-approve
  auto* media_approve = app.add_subcommand("media-approve", "provider approval of a work");
  std::string ma_name, ma_id, ma_agreement;
  media_approve->add_option("--as", ma_name)->required();
  media_approve->add_option("--id", ma_id)->required();
  media_approve->add_option("--agreement-id", ma_agreement)->required();

  // access-request
  auto* access_request = app.add_subcommand("access-request", "request an access token");
  std::string ar_name, ar_media, ar_rights, ar_token_out;
  int64_t ar_duration_ms = 3600 * 1000;
  access_request->add_option("--as", ar_name, "end-user identity")->required();
  access_request->add_option("--media", ar_media)->required();
  access_request->add_option("--rights", ar_rights, "comma-joined right names")->required();
  access_request->add_option("--duration-ms", ar_duration_ms)->capture_default_str();
  access_request->add_option("--token-out", ar_token_out, "also save the token here");

  // token-verify
  auto* token_verify = app.add_subcommand("token-verify", "run the verification steps");
  std::string tv_token, tv_token_file;
  token_verify->add_option("--token", tv_token);
  token_verify->add_option("--token-file", tv_token_file);

  // redeem
  auto* redeem = app.add_subcommand("redeem", "verify + fetch content, check its hash");
  std::string rd_token, rd_token_file, rd_out;
  redeem->add_option("--token", rd_token);
  redeem->add_option("--token-file", rd_token_file);
  redeem->add_option("--out", rd_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (keygen->parsed()) {
      mdm::Keystore ks(ctx.keystore_dir);
      if (ks.load(kg_name)) die(ctx, "identity-exists", kg_name);
      auto e = ks.create(kg_name, kg_did);
      json j;
      j["name"] = e.name;
      j["did"] = e.did;
      j["address"] = mdm::to_hex(e.account.address);
      emit(ctx, j, "created " + e.name + " (" + e.did + ", account " +
                       mdm::to_hex(e.account.address) + ")");
      return 0;
    }

    if (did_register->parsed()) {
      auto e = need_identity(ctx, dr_name);
      auto client = connect(ctx);
      std::string ddo = mdm::make_ddo(e.did, e.account.public_key, dr_endpoint).canonical();
      auto r = client.did_register(e.account, e.did, ddo);
      if (r.ok() && !ctx.json_output) std::cout << e.did << std::endl;
      report_write(ctx, r, "did-register " + e.did);
      return 0;
    }

    if (did_resolve->parsed()) {
      auto client = connect(ctx);
      std::string err;
      auto ddo = client.did_resolve(dres_did, &err);
      if (!ddo) die(ctx, err, dres_did);
      json j;
      j["did"] = dres_did;
      j["ddo"] = *ddo;
      emit(ctx, j, *ddo);
      return 0;
    }

    if (did_update->parsed()) {
      auto e = need_identity(ctx, du_name);
      auto client = connect(ctx);
      std::string ddo = mdm::make_ddo(e.did, e.account.public_key, du_endpoint).canonical();
      report_write(ctx, client.did_update(e.account, e.did, ddo), "did-update " + e.did);
      return 0;
    }

    if (did_revoke->parsed()) {
      auto e = need_identity(ctx, drv_name);
      auto client = connect(ctx);
      report_write(ctx, client.did_revoke(e.account, e.did), "did-revoke " + e.did);
      return 0;
    }

    if (media_register->parsed()) {
      auto e = need_identity(ctx, mr_name);
      auto client = connect(ctx);
      mdm::Bytes content = read_file(ctx, mr_file);
      json up = client.upload(e.account, content, "multimedia-source");
      mdm::Hash32 hash = mdm::sha256(content);
      mdm::MediaRegisterArgs args;
      args.id = mr_id;
      args.owner_did = e.did;
      args.content_hash = hash;
      args.owner_sig =
          mdm::sign(e.account.secret_key, std::span<const uint8_t>(hash.data(), hash.size()));
      args.upload_ref = up["locator"].get<std::string>();
      auto r = client.media_register(e.account, args);
      if (r.ok() && !ctx.json_output)
        std::cout << "content-hash " << mdm::to_hex(hash) << std::endl;
      report_write(ctx, r, "media-register " + mr_id);
      return 0;
    }

    if (agreement_generate->parsed()) {
      auto e = need_identity(ctx, ag_name);
      auto client = connect(ctx);
      auto owner_rec = client.did_record(ag_owner_did);
      if (!owner_rec) die(ctx, "unknown-did", ag_owner_did);
      auto owner_account =
          mdm::from_hex_fixed<20>((*owner_rec)["owner"].get<std::string>()).value();
      mdm::Bytes doc = read_file(ctx, ag_file);
      client.upload(e.account, doc, "agreement-document");
      auto rights = mdm::AccessRights::from_csv(ag_rights);
      if (!rights || rights->empty()) die(ctx, "bad-rights", ag_rights);
      mdm::AgreementGenerateArgs args;
      args.id = ag_id;
      args.owner_did = ag_owner_did;
      args.owner_account = owner_account;
      args.provider_did = e.did;
      args.agreement_hash = mdm::sha256(doc);
      args.valid_time_s = ag_valid_s;
      args.copyrights = rights->names();
      report_write(ctx, client.agreement_generate(e.account, args), "agreement-generate " + ag_id);
      return 0;
    }

    if (agreement_sign->parsed()) {
      if (as_role != "owner" && as_role != "provider") die(ctx, "bad-role", as_role);
      auto e = need_identity(ctx, as_name);
      auto client = connect(ctx);
      auto agr = client.agreement_get(as_id);
      if (!agr) die(ctx, "not-found", as_id);
      auto hash = mdm::from_hex_fixed<32>((*agr)["agreement_hash"].get<std::string>()).value();
      mdm::Bytes msg = mdm::agreement_signing_bytes(
          (*agr)["id"].get<std::string>(), (*agr)["owner_did"].get<std::string>(),
          (*agr)["provider_did"].get<std::string>(), hash,
          (*agr)["valid_time_s"].get<uint64_t>(), (*agr)["copyrights"].get<std::string>());
      mdm::Signature sig = mdm::sign(e.account.secret_key, msg);
      report_write(ctx, client.agreement_sign(e.account, as_id, sig, as_role == "owner"),
                   "agreement-sign " + as_id + " as " + as_role);
      return 0;
    }

    if (media_approve->parsed()) {
      auto e = need_identity(ctx, ma_name);
      auto client = connect(ctx);
      auto agr = client.agreement_get(ma_agreement);
      if (!agr) die(ctx, "not-found", ma_agreement);
      mdm::MediaApproveArgs args;
      args.id = ma_id;
      args.provider_did = e.did;
      args.agreement_hash =
          mdm::from_hex_fixed<32>((*agr)["agreement_hash"].get<std::string>()).value();
      report_write(ctx, client.media_approve(e.account, args), "media-approve " + ma_id);
      return 0;
    }

    if (access_request->parsed()) {
      auto e = need_identity(ctx, ar_name);
      auto client = connect(ctx);
      auto rights = mdm::AccessRights::from_csv(ar_rights);
      if (!rights || rights->empty()) die(ctx, "bad-rights", ar_rights);
      std::vector<std::string> names;
      for (const auto& [name, bit] : mdm::right_name_table())
        if (rights->mask & bit) names.push_back(name);
      json res = client.request_access(e.account, e.did, ar_media, names, ar_duration_ms);
      std::string token = res["token"].get<std::string>();
      if (!ar_token_out.empty())
        write_file(ctx, ar_token_out, mdm::Bytes(token.begin(), token.end()));
      emit(ctx, res, token);
      return 0;
    }

    if (token_verify->parsed()) {
      auto client = connect(ctx);
      std::string token = load_token_arg(ctx, tv_token, tv_token_file);
      json report = client.verify_token(token);
      bool accepted = report.value("accepted", false);
      std::string human = accepted ? "accepted" : "rejected";
      if (!accepted) {
        int failed = report.value("failed_step", 0);
        std::string name;
        for (const auto& s : report["steps"])
          if (s["step"].get<int>() == failed) name = s["name"].get<std::string>();
        human += " at step " + std::to_string(failed) + " (" + name + ")";
      }
      emit(ctx, report, human);
      return accepted ? 0 : 1;
    }

    if (redeem->parsed()) {
      auto client = connect(ctx);
      std::string token_text = load_token_arg(ctx, rd_token, rd_token_file);
      mdm::Bytes content = client.redeem(token_text);
      write_file(ctx, rd_out, content);
      mdm::Hash32 got = mdm::sha256(content);

      // client-side integrity check against the on-chain record
      std::string onchain_hash;
      auto token = mdm::AccessToken::decode(token_text);
      if (token) {
        auto cert = client.chain_query("access-certificates", mdm::to_hex(token->cert_id));
        if (cert) {
          auto media = client.media_record((*cert)["multimedia_id"].get<std::string>());
          if (media) onchain_hash = (*media)["content_hash"].get<std::string>();
        }
      }
      bool match = !onchain_hash.empty() && onchain_hash == mdm::to_hex(got);
      json j;
      j["file"] = rd_out;
      j["bytes"] = content.size();
      j["content_hash"] = mdm::to_hex(got);
      j["onchain_hash"] = onchain_hash;
      j["hash_match"] = match;
      emit(ctx, j,
           "saved " + std::to_string(content.size()) + " bytes to " + rd_out + "\nhash " +
               mdm::to_hex(got) + (match ? " (matches on-chain record)" : " (ON-CHAIN MISMATCH)"));
      return match ? 0 : 1;
    }
  } catch (const mdm::Error& e) {
    die(ctx, e.code(), e.what());
  } catch (const std::exception& e) {
    die(ctx, "internal", e.what());
  }
  return 1;
}
