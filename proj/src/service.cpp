#include "pbc/service.hpp"

#include <httplib.h>

#include "pbc/report.hpp"

namespace pbc {

using nlohmann::json;

HashSet parse_hash_request(const json& body) {
  if (!body.is_object()) throw RequestError(400, "request body must be a JSON object");
  for (const auto& [key, value] : body.items()) {
    if (key != "doc_id" && key != "k" && key != "hash_fn_id" && key != "hashes") {
      throw RequestError(400, "unexpected field \"" + key + "\"; only doc_id, k, hash_fn_id and hashes are accepted");
    }
  }
  for (const char* required : {"doc_id", "k", "hash_fn_id", "hashes"}) {
    if (!body.contains(required)) throw RequestError(400, std::string("missing field \"") + required + "\"");
  }
  const auto& doc_id = body["doc_id"];
  const auto& k = body["k"];
  const auto& fn = body["hash_fn_id"];
  const auto& hashes = body["hashes"];
  if (!doc_id.is_string() || doc_id.get_ref<const std::string&>().empty()) {
    throw RequestError(400, "doc_id must be a non-empty string");
  }
  if (!k.is_number_unsigned() || k.get<std::uint64_t>() == 0) throw RequestError(400, "k must be a positive integer");
  if (!fn.is_string()) throw RequestError(400, "hash_fn_id must be a string");
  if (!hashes.is_array()) throw RequestError(400, "hashes must be an array");

  HashSet set;
  set.doc_id = doc_id.get<std::string>();
  set.k = k.get<std::size_t>();
  set.hash_fn_id = fn.get<std::string>();
  set.hashes.reserve(hashes.size());
  for (const auto& h : hashes) {
    if (!h.is_string()) throw RequestError(400, "hashes must be hex strings");
    try {
      set.hashes.push_back(Digest::from_hex(h.get_ref<const std::string&>()));
    } catch (const InvalidParameterError& e) {
      throw RequestError(400, std::string("malformed hash: ") + e.what());
    }
  }
  set.canonicalize();
  return set;
}

json hash_request_json(const HashSet& set) {
  json hashes = json::array();
  for (const auto& h : set.hashes) hashes.push_back(h.hex());
  return {{"doc_id", set.doc_id}, {"k", set.k}, {"hash_fn_id", set.hash_fn_id}, {"hashes", std::move(hashes)}};
}

json candidates_json(std::span<const PairResult> ranked) {
  json out = json::array();
  for (const auto& r : ranked) {
    out.push_back({{"doc_id", r.doc_id_b},
                   {"intersection", r.intersection_hashes},
                   {"s_pbc", r.s_pbc.decimal()},
                   {"s_bc_recovered", r.s_bc_recovered ? json(r.s_bc_recovered->decimal()) : json(nullptr)}});
  }
  return out;
}

DetectionService::DetectionService(Config config) : config_(std::move(config)) {
  if (config_.k == 0) throw InvalidParameterError("subset size k must be >= 1");
  if (config_.index_path && std::filesystem::exists(*config_.index_path)) {
    auto loaded = InvertedIndex::load(*config_.index_path);
    if (loaded.k() != config_.k || loaded.hash_fn_id() != config_.hash_fn_id) {
      throw ConfigMismatchError("index file " + config_.index_path->string() + " was built with k = " +
                                std::to_string(loaded.k()) + ", " + loaded.hash_fn_id());
    }
    index_ = std::make_shared<const InvertedIndex>(std::move(loaded));
  } else {
    index_ = std::make_shared<const InvertedIndex>(config_.k, config_.hash_fn_id);
  }
}

std::shared_ptr<const InvertedIndex> DetectionService::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return index_;
}

void DetectionService::check_config(const HashSet& set) const {
  if (set.k != config_.k || set.hash_fn_id != config_.hash_fn_id) {
    throw RequestError(409, "service is configured for k = " + std::to_string(config_.k) + ", " +
                                config_.hash_fn_id + "; request uses k = " + std::to_string(set.k) + ", " +
                                set.hash_fn_id);
  }
}

json DetectionService::submit(const json& body) {
  const HashSet set = parse_hash_request(body);
  check_config(set);
  std::lock_guard writer(writer_mu_);
  auto next = std::make_shared<const InvertedIndex>(snapshot()->with_document(set));
  if (config_.index_path) next->persist(*config_.index_path);
  {
    std::lock_guard lock(snapshot_mu_);
    index_ = next;
  }
  return {{"doc_id", set.doc_id},
          {"docs", next->doc_count()},
          {"hashes", set.size()},
          {"index_hashes", next->entry_count()}};
}

json DetectionService::query(const json& body) const {
  const HashSet set = parse_hash_request(body);
  check_config(set);
  const auto index = snapshot();
  const auto overlaps = index->intersect(set);
  const auto ranked = rank_candidates(set, overlaps);
  return {{"index_k", index->k()}, {"candidates", candidates_json(ranked)}};
}

json DetectionService::stats() const {
  const auto index = snapshot();
  json hist = {{"in_1", 0}, {"in_2", 0}, {"in_3", 0}, {"ratio_in_1", "0"}, {"ratio_in_2", "0"}, {"ratio_in_3", "0"}};
  if (!index->empty()) {
    const auto h = index->occurrence_histogram();
    hist = {{"in_1", h.in_1},
            {"in_2", h.in_2},
            {"in_3", h.in_3},
            {"ratio_in_1", h.ratio_in_1.decimal()},
            {"ratio_in_2", h.ratio_in_2.decimal()},
            {"ratio_in_3", h.ratio_in_3.decimal()}};
  }
  return {{"k", index->k()},
          {"hash_fn_id", index->hash_fn_id()},
          {"docs", index->doc_count()},
          {"hashes", index->entry_count()},
          {"postings", index->posting_count()},
          {"histogram", std::move(hist)}};
}

// ---------------------------------------------------------------------------

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Handler>
void guarded(httplib::Response& res, Handler&& handler) {
  try {
    reply(res, 200, handler());
  } catch (const RequestError& e) {
    reply(res, e.status(), {{"error", e.what()}});
  } catch (const json::exception& e) {
    reply(res, 400, {{"error", std::string("invalid JSON: ") + e.what()}});
  } catch (const std::exception& e) {
    reply(res, 500, {{"error", e.what()}});
  }
}

}  // namespace

HttpFrontend::HttpFrontend(DetectionService& service) : server_(std::make_unique<httplib::Server>()) {
  server_->Post("/submit", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return service.submit(json::parse(req.body)); });
  });
  server_->Post("/query", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { return service.query(json::parse(req.body)); });
  });
  server_->Get("/stats", [&service](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { return service.stats(); });
  });
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpFrontend::listen() { server_->listen_after_bind(); }

void HttpFrontend::stop() {
  if (server_) server_->stop();
}

}  // namespace pbc
