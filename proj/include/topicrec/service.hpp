#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include <json.hpp>

#include "topicrec/engine.hpp"
#include "topicrec/error.hpp"

namespace httplib {
class Server;
}

namespace topicrec {

// HTTP status for a library error code.
int http_status(Errc code);

// GET /users/{id}/profile body: u entries sorted by |weight| descending.
nlohmann::json profile_view(const UserProfile& profile);

// JSON-over-HTTP facade:
//   POST /corpus/docs            JSONL body -> {added, errors}
//   POST /train                  {lda: {...}, domains: {...}} -> training report
//   POST /users/{id}/query       {text, k} -> {query_id, results, applied_query, original_query}
//   POST /users/{id}/feedback    {query_id, preferred_doc_ids} -> ack
//   GET  /users/{id}/profile
//   GET  /health
class Service {
 public:
  explicit Service(Engine& engine);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  bool listen(const std::string& host, int port);
  // Binds to an ephemeral port and returns it (or -1); then call listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  void register_routes();

  Engine& engine_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace topicrec
