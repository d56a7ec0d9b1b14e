#include "topicrec/service.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>

namespace topicrec {

namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  reply(res, status, json{{"error", code}, {"message", message}});
}

// Runs a handler, translating exceptions into JSON error responses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    reply_error(res, http_status(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    reply_error(res, 400, "BadRequest", e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, "Internal", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("request body is not valid JSON: ") + e.what());
  }
}

json results_json(const std::vector<RankedResult>& results, const Engine& engine) {
  json out = json::array();
  for (const auto& r : results) {
    auto doc = engine.document(r.doc_id);
    out.push_back({{"doc_id", r.doc_id}, {"title", doc ? doc->title : std::string()}, {"score", r.score}});
  }
  return out;
}

}  // namespace

int http_status(Errc code) {
  switch (code) {
    case Errc::NotFound: return 404;
    case Errc::Conflict:
    case Errc::NotTrained:
    case Errc::DuplicateId:
    case Errc::EmptyCorpus: return 409;
    case Errc::MalformedLine: return 400;
    case Errc::InvalidConfig:
    case Errc::InvalidArgument:
    case Errc::UnknownDoc:
    case Errc::NoEmbeddableTokens:
    case Errc::EmptyResult:
    case Errc::DegenerateVocabulary:
    case Errc::EmptyDomain:
    case Errc::UnknownWordAll: return 422;
    default: return 500;
  }
}

json profile_view(const UserProfile& profile) {
  std::vector<BagOfTopics::Entry> entries = profile.preference.entries();
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return std::abs(a.second) > std::abs(b.second); });
  json u = json::array();
  for (const auto& [topic, w] : entries) {
    auto st = profile.staleness.find(topic);
    auto pv = profile.provenance.find(topic);
    u.push_back({{"topic", topic.to_string()},
                 {"weight", w},
                 {"staleness", st == profile.staleness.end() ? 0u : st->second},
                 {"provenance", pv != profile.provenance.end() && pv->second == Provenance::FromQuery ? "query"
                                                                                                       : "feedback"}});
  }
  return json{{"user_id", profile.user_id},
              {"preference", u},
              {"queries_since_update", profile.queries_since_update},
              {"buffered_feedback", profile.feedback_buffer.size()},
              {"history", {{"queries_total", profile.queries_total}, {"updates_applied", profile.updates_applied}}}};
}

Service::Service(Engine& engine) : engine_(engine), server_(std::make_unique<httplib::Server>()) { register_routes(); }

Service::~Service() { stop(); }

void Service::register_routes() {
  auto& svr = *server_;

  svr.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, json{{"status", "ok"}, {"trained", engine_.trained()}, {"documents", engine_.document_count()}});
  });

  svr.Post("/corpus/docs", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      ParsedCorpus parsed = parse_corpus(req.body);
      json errors = json::array();
      for (const auto& e : parsed.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
      std::vector<std::string> duplicates = parsed.duplicate_ids;
      for (const auto& d : parsed.documents) {
        if (engine_.document(d.id)) duplicates.push_back(d.id);
      }
      if (!duplicates.empty()) {
        reply(res, 409, json{{"error", "DuplicateId"}, {"duplicate_ids", duplicates}, {"added", 0}, {"errors", errors}});
        return;
      }
      if (!parsed.errors.empty()) {
        reply(res, 400, json{{"error", "MalformedLine"}, {"added", 0}, {"errors", errors}});
        return;
      }
      const std::size_t added = engine_.add_documents(std::move(parsed.documents));
      reply(res, 200, json{{"added", added}, {"errors", errors}});
    });
  });

  svr.Post("/train", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body = req.body.empty() ? json::object() : parse_body(req);
      TrainOptions opts;
      if (body.contains("lda")) {
        const json& l = body["lda"];
        const auto topics = l.value("topics", std::int64_t{opts.lda.topics});
        const auto iterations = l.value("iterations", std::int64_t{opts.lda.iterations});
        if (topics < 0 || iterations < 0) throw Error(Errc::InvalidConfig, "topics and iterations must be positive");
        opts.lda.topics = static_cast<std::uint32_t>(topics);
        opts.lda.iterations = static_cast<std::uint32_t>(iterations);
        if (l.contains("alpha")) opts.lda.alpha = l["alpha"].get<double>();
        opts.lda.beta = l.value("beta", opts.lda.beta);
        opts.lda.seed = l.value("seed", opts.lda.seed);
        opts.lda.min_doc_freq = l.value("min_doc_freq", opts.lda.min_doc_freq);
      }
      if (body.contains("domains")) {
        const json& d = body["domains"];
        opts.top_m = d.value("top_m", opts.top_m);
        opts.threshold = d.value("threshold", opts.threshold);
      }
      opts.lda.validate();
      TrainingReport report = engine_.train(opts);
      json domains = json::array();
      for (const auto& d : report.domains) {
        domains.push_back({{"domain", d.domain},
                           {"topics", d.topics},
                           {"vocabulary_size", d.vocabulary_size},
                           {"documents", d.documents},
                           {"iterations", d.iterations},
                           {"seed", d.seed}});
      }
      reply(res, 200,
            json{{"domains", domains},
                 {"indexed", report.index.indexed},
                 {"unindexable", report.index.unindexable}});
    });
  });

  svr.Post("/users/:id/query", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string user = req.path_params.at("id");
      json body = parse_body(req);
      const std::string text = body.value("text", std::string());
      std::int64_t k = 0;  // 0 selects the engine default
      if (body.contains("k")) {
        if (!body["k"].is_number_integer()) throw Error(Errc::InvalidArgument, "k must be an integer");
        k = body["k"].get<std::int64_t>();
        if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
      }
      if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(Errc::InvalidArgument, "query text is empty");
      }
      if (!engine_.trained()) throw Error(Errc::NotTrained, "models not trained");
      QueryOutcome q = engine_.query(user, text, static_cast<std::size_t>(k));
      reply(res, 200,
            json{{"query_id", q.query_id},
                 {"results", results_json(q.results, engine_)},
                 {"applied_query", to_json(q.applied)},
                 {"original_query", to_json(q.original)}});
    });
  });

  svr.Post("/users/:id/feedback", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string user = req.path_params.at("id");
      json body = parse_body(req);
      const std::string query_id = body.at("query_id").get<std::string>();
      const auto preferred = body.value("preferred_doc_ids", std::vector<std::string>{});
      FeedbackOutcome out = engine_.feedback(user, query_id, preferred);
      reply(res, 200,
            json{{"accepted", true}, {"preferred", out.preferred}, {"profile_updated", out.profile_updated}});
    });
  });

  svr.Get("/users/:id/profile", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string user = req.path_params.at("id");
      auto profile = engine_.profile(user);
      if (!profile) throw Error(Errc::NotFound, "unknown user \"" + user + "\"");
      reply(res, 200, profile_view(*profile));
    });
  });
}

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

int Service::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace topicrec
