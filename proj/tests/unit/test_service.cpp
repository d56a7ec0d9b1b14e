#include <gtest/gtest.h>

#include <httplib.h>

#include <filesystem>
#include <thread>

#include "fixtures.hpp"
#include "topicrec/service.hpp"

using namespace topicrec;
using namespace topicrec::testing;
using nlohmann::json;

namespace {

class Running {
 public:
  explicit Running(Engine& engine) : service_(engine) {
    port_ = service_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { service_.listen_after_bind(); });
    service_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(120, 0);
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }

  httplib::Client& client() { return *client_; }
  int port() const { return port_; }

  std::pair<int, json> post(const std::string& path, const std::string& body,
                            const std::string& type = "application/json") {
    auto res = client_->Post(path, body, type);
    if (!res) return {-1, json()};
    return {res->status, res->body.empty() ? json() : json::parse(res->body)};
  }
  std::pair<int, json> get(const std::string& path) {
    auto res = client_->Get(path);
    if (!res) return {-1, json()};
    return {res->status, json::parse(res->body)};
  }

 private:
  Service service_;
  int port_ = -1;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

std::string toy_jsonl() {
  std::string body;
  for (const auto& d : toy_documents()) {
    body += json{{"id", d.id}, {"title", "Paper " + d.id}, {"text", d.text}, {"domains", d.domains}}.dump() + "\n";
  }
  return body;
}

const std::string kToyTrain = R"({"lda":{"topics":2,"iterations":200,"alpha":0.1,"beta":0.01,"seed":1}})";

std::unique_ptr<Engine> engine_with_vectors() {
  auto e = std::make_unique<Engine>();
  e->set_embeddings(toy_embeddings());
  return e;
}

}  // namespace

TEST(ServiceStatus, ErrorMapping) {
  EXPECT_EQ(http_status(Errc::NotFound), 404);
  EXPECT_EQ(http_status(Errc::Conflict), 409);
  EXPECT_EQ(http_status(Errc::NotTrained), 409);
  EXPECT_EQ(http_status(Errc::DuplicateId), 409);
  EXPECT_EQ(http_status(Errc::MalformedLine), 400);
  EXPECT_EQ(http_status(Errc::InvalidConfig), 422);
  EXPECT_EQ(http_status(Errc::UnknownDoc), 422);
  EXPECT_EQ(http_status(Errc::IoFailure), 500);
}

TEST(ServiceApi, Health) {
  auto e = engine_with_vectors();
  Running s(*e);
  auto [status, body] = s.get("/health");
  EXPECT_EQ(status, 200);
  EXPECT_EQ(body["status"], "ok");
  EXPECT_EQ(body["trained"], false);
}

TEST(ServiceApi, CorpusIngest) {
  auto e = engine_with_vectors();
  Running s(*e);
  auto [st1, b1] = s.post("/corpus/docs", "{\"id\":\"p1\",\"text\":\"apple\"}\n{\"id\":\"p2\",\"text\":\"cpu\"}\n",
                          "application/x-ndjson");
  EXPECT_EQ(st1, 200);
  EXPECT_EQ(b1["added"], 2);
  EXPECT_EQ(b1["errors"], json::array());

  auto [st2, b2] = s.post("/corpus/docs", "{\"id\":\"p1\",\"text\":\"again\"}\n", "application/x-ndjson");
  EXPECT_EQ(st2, 409);
  EXPECT_EQ(b2["duplicate_ids"], json::array({"p1"}));

  auto [st3, b3] = s.post("/corpus/docs", "", "application/x-ndjson");
  EXPECT_EQ(st3, 200);
  EXPECT_EQ(b3["added"], 0);

  auto [st4, b4] = s.post("/corpus/docs", "{\"id\":\"p3\",\"text\":\"ok\"}\n{broken\n", "application/x-ndjson");
  EXPECT_EQ(st4, 400);
  EXPECT_EQ(b4["errors"][0]["line"], 2);
  EXPECT_EQ(e->document_count(), 2u);
}

TEST(ServiceApi, TrainReportAndValidation) {
  auto e = engine_with_vectors();
  Running s(*e);
  auto [st0, b0] = s.post("/train", kToyTrain);
  EXPECT_EQ(st0, 409);  // empty corpus
  s.post("/corpus/docs", toy_jsonl(), "application/x-ndjson");

  auto [st1, b1] = s.post("/train", R"({"lda":{"topics":1}})");
  EXPECT_EQ(st1, 422);
  EXPECT_EQ(b1["error"], "InvalidConfig");

  auto [st2, b2] = s.post("/train", kToyTrain);
  ASSERT_EQ(st2, 200) << b2.dump();
  ASSERT_EQ(b2["domains"].size(), 2u);
  EXPECT_EQ(b2["domains"][0]["domain"], "FRU");
  EXPECT_EQ(b2["domains"][0]["topics"], 2);
  EXPECT_EQ(b2["domains"][0]["vocabulary_size"], 4);  // titles add "paper"
  EXPECT_EQ(b2["domains"][0]["iterations"], 200);
  EXPECT_EQ(b2["domains"][0]["seed"], 1);
  EXPECT_EQ(b2["indexed"], 40);
}

TEST(ServiceApi, ConcurrentTrainIsRejected) {
  auto e = engine_with_vectors();
  e->add_documents(toy_documents());
  Running s(*e);
  std::pair<int, json> slow;
  std::thread worker([&] {
    httplib::Client c("127.0.0.1", s.port());
    c.set_read_timeout(300, 0);
    auto res = c.Post("/train", R"({"lda":{"topics":2,"iterations":200000,"alpha":0.1}})", "application/json");
    slow = {res ? res->status : -1, json()};
  });
  while (!e->training_in_progress() && !e->trained()) std::this_thread::yield();
  auto [status, body] = s.post("/train", kToyTrain);
  worker.join();
  EXPECT_EQ(status, 409);
  EXPECT_EQ(body["error"], "Conflict");
  EXPECT_EQ(slow.first, 200);
}

TEST(ServiceApi, QueryErrors) {
  auto e = engine_with_vectors();
  e->add_documents(toy_documents());
  Running s(*e);
  EXPECT_EQ(s.post("/users/u1/query", R"({"text":"apple"})").first, 409);
  s.post("/train", kToyTrain);
  EXPECT_EQ(s.post("/users/u1/query", R"({"text":""})").first, 422);
  EXPECT_EQ(s.post("/users/u1/query", R"({"text":"   "})").first, 422);
  EXPECT_EQ(s.post("/users/u1/query", R"({"text":"apple","k":0})").first, 422);
  EXPECT_EQ(s.post("/users/u1/query", "not json").first, 422);
}

TEST(ServiceApi, QueryFeedbackProfileLoop) {
  auto e = engine_with_vectors();
  e->add_documents(toy_documents());
  Running s(*e);
  s.post("/train", kToyTrain);

  EXPECT_EQ(s.get("/users/ann/profile").first, 404);

  auto [st, q] = s.post("/users/ann/query", R"({"text":"apple banana","k":100})");
  ASSERT_EQ(st, 200) << q.dump();
  EXPECT_EQ(q["applied_query"], q["original_query"]);
  EXPECT_EQ(q["results"].size(), 20u);
  double last = 2.0;
  for (const auto& r : q["results"]) {
    EXPECT_LE(r["score"].get<double>(), last);
    last = r["score"].get<double>();
    EXPECT_EQ(r["title"], e->document(r["doc_id"].get<std::string>())->title);
  }

  auto [pst, fresh] = s.get("/users/ann/profile");
  EXPECT_EQ(pst, 200);
  EXPECT_EQ(fresh["preference"], json::array());

  const std::string qid = q["query_id"];
  auto [fst, fb] = s.post("/users/ann/feedback",
                          json{{"query_id", qid}, {"preferred_doc_ids", {q["results"][0]["doc_id"], "hw-2"}}}.dump());
  ASSERT_EQ(fst, 200) << fb.dump();
  EXPECT_EQ(fb["accepted"], true);
  EXPECT_EQ(fb["profile_updated"], true);

  EXPECT_EQ(s.post("/users/ann/feedback", json{{"query_id", qid}, {"preferred_doc_ids", json::array()}}.dump()).first,
            409);
  EXPECT_EQ(s.post("/users/ann/feedback", R"({"query_id":"q0000000000000000","preferred_doc_ids":[]})").first, 404);
  EXPECT_EQ(s.post("/users/zed/feedback", json{{"query_id", qid}, {"preferred_doc_ids", json::array()}}.dump()).first,
            404);

  auto profile = *e->profile("ann");
  auto [q2st, q2] = s.post("/users/ann/query", R"({"text":"apple banana"})");
  ASSERT_EQ(q2st, 200);
  EXPECT_EQ(bag_from_json(q2["applied_query"]), bag_from_json(q2["original_query"]) + profile.preference);
  EXPECT_EQ(q2["results"].size(), 10u);

  auto q3 = s.post("/users/ann/query", R"({"text":"apple"})").second;
  EXPECT_EQ(s.post("/users/ann/feedback",
                   json{{"query_id", q3["query_id"]}, {"preferred_doc_ids", {"nope"}}}.dump()).first,
            422);
}

TEST(ServiceApi, InjectedTopicShowsInAppliedQuery) {
  auto e = engine_with_vectors();
  e->add_documents(toy_documents());
  Running s(*e);
  s.post("/train", kToyTrain);
  UserProfile p;
  p.user_id = "mo";
  p.preference = BagOfTopics{{TopicId{"MAT", 9}, 0.5}};
  e->put_profile(p);
  auto [st, q] = s.post("/users/mo/query", R"({"text":"cpu"})");
  ASSERT_EQ(st, 200);
  bool found = false;
  for (const auto& entry : q["applied_query"]) {
    if (entry["topic"] == "MAT9") found = entry["weight"] == 0.5;
  }
  EXPECT_TRUE(found) << q["applied_query"].dump();
}

TEST(ServiceApi, WorkedFeedbackScenarioEndToEnd) {
  auto dir = std::filesystem::temp_directory_path() / "topicrec_service_worked";
  write_worked_example(dir);
  auto e = Engine::load(dir);
  Running s(*e);
  auto [st, q] = s.post("/users/w/query", json{{"text", worked_example_query()}, {"k", 5}}.dump());
  ASSERT_EQ(st, 200) << q.dump();
  EXPECT_EQ(bag_from_json(q["original_query"]).to_string(), "6 CS3 + 2 HUM4 + 5 MAT1");
  EXPECT_EQ(e->document("r1")->bag.to_string(), "1 CS3 + 3 CS6 + 4 MAT1");
  EXPECT_EQ(e->document("r2")->bag.to_string(), "1 CS3 + 1 HUM4 + 5 MAT9");

  auto [fst, fb] = s.post("/users/w/feedback",
                          json{{"query_id", q["query_id"]}, {"preferred_doc_ids", json::array({"r1", "r2"})}}.dump());
  ASSERT_EQ(fst, 200);
  auto [pst, view] = s.get("/users/w/profile");
  ASSERT_EQ(pst, 200);
  const std::vector<std::pair<std::string, double>> expected = {
      {"CS3", 0.1732143}, {"HUM4", 0.0857143}, {"MAT1", 0.05}, {"CS6", 0.03125}, {"MAT9", 0.0142857}};
  ASSERT_EQ(view["preference"].size(), expected.size()) << view.dump();
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(view["preference"][i]["topic"], expected[i].first);
    EXPECT_NEAR(view["preference"][i]["weight"].get<double>(), expected[i].second, 1e-7);
  }
  EXPECT_EQ(view["preference"][0]["provenance"], "query");
  EXPECT_EQ(view["preference"][4]["provenance"], "feedback");
  std::filesystem::remove_all(dir);
}

TEST(ServiceApi, GetDoesNotMutate) {
  auto e = engine_with_vectors();
  e->add_documents(toy_documents());
  Running s(*e);
  s.post("/train", kToyTrain);
  s.post("/users/x/query", R"({"text":"gpu"})");
  auto before = *e->profile("x");
  s.get("/users/x/profile");
  s.get("/users/x/profile");
  EXPECT_EQ(*e->profile("x"), before);
}
