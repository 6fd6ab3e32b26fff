#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>

#include "json.hpp"
#include "pbc/errors.hpp"
#include "pbc/indexstore.hpp"

namespace httplib {
class Server;
}

namespace pbc {

/// A request the service refuses; `status` is the HTTP status to answer with.
class RequestError : public Error {
 public:
  RequestError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Validates a submit/query body: exactly the fields doc_id, k, hash_fn_id and
/// hashes (40-char hex strings). Anything else is rejected with status 400,
/// so reference titles or other cleartext cannot be attached.
HashSet parse_hash_request(const nlohmann::json& body);

/// Builds the wire body for a hash set.
nlohmann::json hash_request_json(const HashSet& set);

/// Candidate list as sent by /query.
nlohmann::json candidates_json(std::span<const PairResult> ranked);

/// The detection side of the protocol: it only ever sees hash sets.
///
/// Queries run against an immutable index snapshot. Submissions are
/// serialized; each one builds a new index and publishes it with a pointer
/// swap, so a reader sees a document's old or new hash set, never a mix.
class DetectionService {
 public:
  struct Config {
    std::size_t k = 2;
    std::string hash_fn_id = kDefaultHashFnId;
    std::optional<std::filesystem::path> index_path;  ///< loaded at start, rewritten after each submit
  };

  explicit DetectionService(Config config);

  /// {"doc_id", "k", "hash_fn_id", "hashes"} -> {"docs", "hashes"}
  nlohmann::json submit(const nlohmann::json& body);
  /// Same body -> {"index_k", "candidates": [...]}. The query is not stored.
  nlohmann::json query(const nlohmann::json& body) const;
  nlohmann::json stats() const;

  std::shared_ptr<const InvertedIndex> snapshot() const;
  const Config& config() const noexcept { return config_; }

 private:
  void check_config(const HashSet& set) const;

  Config config_;
  mutable std::mutex snapshot_mu_;  // guards the pointer only
  std::shared_ptr<const InvertedIndex> index_;
  std::mutex writer_mu_;
};

/// HTTP front end: POST /submit, POST /query, GET /stats.
class HttpFrontend {
 public:
  explicit HttpFrontend(DetectionService& service);
  ~HttpFrontend();
  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void listen();
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace pbc
