// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "topicrec/eval.hpp"
#include "topicrec/profile.hpp"
#include "topicrec/ranker.hpp"
#include "topicrec/rng.hpp"
#include "topicrec/service.hpp"

using namespace topicrec;
using namespace topicrec::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

TopicId T(const char* s) { return TopicId::parse(s); }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome cosine_example() {
  BagOfTopics q{{T("MAT1"), 5}, {T("CS3"), 6}, {T("HUM4"), 2}};
  BagOfTopics r{{T("MAT1"), 3}, {T("CS3"), 2}, {T("ENG5"), 2}};
  const double c = bot_cosine(q, r);
  return {std::abs(c - 0.8122) <= 0.005, fmt("cosine = %.6f (expected 0.8122 +- 0.005)", c)};
}

Outcome profile_oracle() {
  const std::map<std::string, double> expected = {
      {"MAT1", 0.05}, {"CS3", 0.1732143}, {"CS6", 0.03125}, {"MAT9", 0.0142857}, {"HUM4", 0.0857143}};
  // The rounded constants above carry 7 decimals; the exact fractions they
  // stand for are checked to 1e-9.
  const std::map<std::string, double> exact = {{"MAT1", 0.1 * (1 - 4.0 / 8)},
                                                {"CS3", 0.1 * (1 - 1.0 / 8) + 0.1 * (1 - 1.0 / 7)},
                                                {"CS6", 0.05 * (1 - 3.0 / 8)},
                                                {"MAT9", 0.05 * (1 - 5.0 / 7)},
                                                {"HUM4", 0.1 * (1 - 1.0 / 7)}};
  auto check = [&](const BagOfTopics& u, const std::string& where) -> Outcome {
    if (u.size() != expected.size()) return {false, where + ": u has " + std::to_string(u.size()) + " entries"};
    double worst = 0, worst_rounded = 0;
    for (const auto& [name, value] : exact) {
      worst = std::max(worst, std::abs(u.weight(T(name.c_str())) - value));
      worst_rounded = std::max(worst_rounded, std::abs(u.weight(T(name.c_str())) - expected.at(name)));
    }
    return {worst <= 1e-9 && worst_rounded <= 5e-8,
            where + fmt(": max |u - exact| = %.2e, max |u - 7-decimal oracle| = %.2e", worst, worst_rounded)};
  };

  UserProfile p;
  BagOfTopics q{{T("MAT1"), 5}, {T("CS3"), 6}, {T("HUM4"), 2}};
  record_feedback(p, q, {BagOfTopics{{T("MAT1"), 4}, {T("CS3"), 1}, {T("CS6"), 3}},
                         BagOfTopics{{T("MAT9"), 5}, {T("CS3"), 1}, {T("HUM4"), 1}}});
  ProfileConfig cfg;
  update_profile(p, cfg, true);
  Outcome lib = check(p.preference, "library");
  if (!lib.pass) return lib;

  // Same scenario through preprocess -> domains -> bags -> query -> feedback.
  const fs::path dir = fs::temp_directory_path() / "topicrec_acceptance_worked";
  write_worked_example(dir);
  auto engine = Engine::load(dir);
  auto out = engine->query("oracle", worked_example_query(), 5);
  engine->feedback("oracle", out.query_id, {"r1", "r2"});
  Outcome pipe = check(engine->profile("oracle")->preference, "pipeline");
  fs::remove_all(dir);
  return {pipe.pass, lib.detail + "; " + pipe.detail};
}

Outcome lda_separation() {
  const auto start = Clock::now();
  const auto corpus = two_theme_corpus();
  std::size_t vocab = 0;
  int separated = 0;
  std::string purities;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = train_lda(corpus, toy_lda_config(seed), "TOY");
    vocab = r.model.vocabulary().size();
    const double purity = toy_purity(build_inverted_index(r.model), corpus);
    if (purity >= 0.9) ++separated;
    purities += fmt("%.3f ", purity);
  }
  const double elapsed = seconds_since(start);
  return {separated >= 4 && elapsed < 10.0 && corpus.size() == 40 && vocab == 6,
          std::to_string(separated) + "/5 seeds with purity >= 0.9 (" + purities + ") on " +
              std::to_string(corpus.size()) + " docs, V=" + std::to_string(vocab) + fmt(", %.2f s", elapsed)};
}

Outcome feedback_improves() {
  const auto start = Clock::now();
  PlantedWorld world = planted_world();
  Engine engine;
  engine.set_embeddings(world.embeddings);
  engine.add_documents(world.documents);
  engine.train(planted_train_options());
  EvalReport report = run_session(world.spec, engine);
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << report.improved_count << "/" << report.total_users << " users improved after " << world.spec.iterations
     << " iterations (k=" << world.spec.k << ")" << fmt(", %.2f s incl. training", elapsed);
  for (const auto& u : report.users) {
    os << "\n      " << u.user_id << fmt(": jaccard(q) = %.4f  jaccard(q') = %.4f", u.jaccard_q, u.jaccard_q_prime);
  }
  return {report.total_users == 15 && report.improved_count >= 12 && elapsed < 60.0, os.str()};
}

// Compact re-statements of the invariant suites, independent of the unit tests.
Outcome invariants() {
  std::vector<std::string> broken;
  Rng rng(2718);

  // phi / theta normalization and index brute force on the toy corpus.
  const auto corpus = two_theme_corpus();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto r = train_lda(corpus, toy_lda_config(seed), "TOY");
    const auto& m = r.model;
    for (std::size_t t = 0; t < m.topics(); ++t) {
      double s = 0;
      for (double p : m.phi_row(t)) s += p;
      if (std::abs(s - 1) > 1e-9) broken.push_back("phi row sum");
    }
    for (const auto& d : r.doc_topics) {
      double s = 0;
      for (double p : d.theta) s += p;
      if (std::abs(s - 1) > 1e-9) broken.push_back("theta sum");
    }
    auto index = build_inverted_index(m);
    for (std::uint32_t w = 0; w < m.vocabulary().size(); ++w) {
      std::uint32_t best = 0;
      for (std::uint32_t t = 1; t < m.topics(); ++t) {
        if (m.phi(t, w) > m.phi(best, w)) best = t;
      }
      const IndexEntry* e = index.find(m.vocabulary().word(w));
      if (e == nullptr || e->topic != best || e->probability != m.phi(best, w)) broken.push_back("index argmax");
    }
  }

  // rank == exhaustive sort for <= 100 candidates.
  const std::vector<std::string> names = {"A0", "A1", "A2", "B0", "B1", "C0"};
  auto random_bag = [&](bool may_be_empty) {
    BagOfTopics b;
    for (std::uint32_t i = 0, n = rng.below(4) + (may_be_empty ? 0 : 1); i < n; ++i) {
      b.add(T(names[rng.below(6)].c_str()), 1 + rng.below(5));
    }
    return b;
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BagOfTopics> bags;
    std::vector<std::string> ids;
    for (std::uint32_t i = 0, n = rng.below(101); i < n; ++i) {
      bags.push_back(random_bag(true));
      ids.push_back("d" + std::to_string(i));
    }
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < bags.size(); ++i) cands.push_back({ids[i], &bags[i]});
    auto q = random_bag(false);
    std::vector<std::pair<double, std::string>> all;
    for (std::size_t i = 0; i < bags.size(); ++i) {
      if (bags[i].norm() == 0) continue;
      double dot = 0;
      for (const auto& [t, w] : q.entries()) dot += w * bags[i].weight(t);
      all.emplace_back(-dot / (q.norm() * bags[i].norm()), ids[i]);
    }
    std::sort(all.begin(), all.end());
    const std::size_t k = 1 + rng.below(20);
    auto got = rank(q, cands, k);
    if (got.size() != std::min(k, all.size())) {
      broken.push_back("rank length");
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].doc_id != all[i].second && std::abs(got[i].score + all[i].first) > 1e-12) broken.push_back("rank order");
    }
  }

  // q' = q + u exactly.
  for (int trial = 0; trial < 200; ++trial) {
    auto q = random_bag(false);
    UserProfile p;
    for (std::uint32_t i = 0, n = rng.below(4); i < n; ++i) p.preference.add(T(names[rng.below(6)].c_str()), rng.uniform() - 0.5);
    auto m = modify_query(q, p);
    for (const auto& n : names) {
      if (m.modified.weight(T(n.c_str())) != q.weight(T(n.c_str())) + p.preference.weight(T(n.c_str()))) {
        broken.push_back("q' = q + u");
      }
    }
  }

  // Penalty monotonicity and truncation postcondition.
  for (int trial = 0; trial < 100; ++trial) {
    ProfileConfig cfg;
    UserProfile p;
    record_feedback(p, BagOfTopics{{T("A0"), 1}}, {BagOfTopics{{T("A0"), 1}, {T("C0"), 1 + rng.below(3)}}});
    update_profile(p, cfg, true);
    double previous = p.preference.weight(T("C0"));
    for (int cycle = 0; cycle < 8; ++cycle) {
      std::vector<BagOfTopics> preferred;
      for (std::uint32_t i = 0, n = rng.below(3); i < n; ++i) {
        auto b = random_bag(false);
        b.erase(T("C0"));
        if (!b.empty()) preferred.push_back(b);
      }
      record_feedback(p, random_bag(false), preferred);
      update_profile(p, cfg, true);
      for (const auto& [t, w] : p.preference.entries()) {
        if (std::abs(w) < cfg.truncate_eps) broken.push_back("truncation");
      }
      if (!p.preference.contains(T("C0"))) break;
      const double now = p.preference.weight(T("C0"));
      if (now > previous) broken.push_back("penalty monotonicity");
      previous = now;
    }
  }

  // Seed determinism: bit-identical model files.
  const fs::path dir = fs::temp_directory_path() / "topicrec_acceptance_det";
  fs::create_directories(dir);
  for (int run = 0; run < 2; ++run) {
    save_model(train_lda(corpus, toy_lda_config(77), "TOY").model, dir / ("m" + std::to_string(run) + ".lda"));
  }
  auto bytes = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
  };
  if (bytes(dir / "m0.lda") != bytes(dir / "m1.lda") || bytes(dir / "m0.lda").empty()) broken.push_back("determinism");
  fs::remove_all(dir);

  std::sort(broken.begin(), broken.end());
  broken.erase(std::unique(broken.begin(), broken.end()), broken.end());
  std::string detail = "normalization, index brute force, rank vs exhaustive sort, q' = q + u, penalty monotonicity, "
                       "truncation, seed determinism";
  if (!broken.empty()) {
    detail = "violated:";
    for (const auto& b : broken) detail += " [" + b + "]";
  }
  return {broken.empty(), detail};
}

// The whole query/feedback/profile loop over HTTP with nothing but the
// service in front of the engine.
Outcome headless_http() {
  const fs::path dir = fs::temp_directory_path() / "topicrec_acceptance_http";
  write_worked_example(dir);
  auto engine = Engine::load(dir);
  Service service(*engine);
  const int port = service.bind_to_any_port("127.0.0.1");
  if (port < 0) return {false, "could not bind a port"};
  std::thread server([&] { service.listen_after_bind(); });
  service.wait_until_ready();

  Outcome out{false, ""};
  try {
    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/health");
    nlohmann::json q{{"text", worked_example_query()}, {"k", 5}};
    auto query = client.Post("/users/web/query", q.dump(), "application/json");
    std::string qid;
    if (query && query->status == 200) qid = nlohmann::json::parse(query->body).at("query_id").get<std::string>();
    nlohmann::json fb{{"query_id", qid}, {"preferred_doc_ids", nlohmann::json::array({"r1", "r2"})}};
    auto feedback = client.Post("/users/web/feedback", fb.dump(), "application/json");
    auto profile = client.Get("/users/web/profile");
    double cs3 = 0;
    if (profile && profile->status == 200) {
      const auto view = nlohmann::json::parse(profile->body);
      for (const auto& e : view.at("preference")) {
        if (e.at("topic") == "CS3") cs3 = e.at("weight").get<double>();
      }
    }
    const bool ok = health && health->status == 200 && !qid.empty() && feedback && feedback->status == 200 &&
                    std::abs(cs3 - (0.1 * 7 / 8 + 0.1 * 6 / 7)) <= 1e-9;
    out = {ok, fmt("health, query, feedback and profile served over HTTP on port %.0f; CS3 weight %.7f", port, cs3)};
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  service.stop();
  server.join();
  fs::remove_all(dir);
  return out;
}

}  // namespace

int main() {
  report("cosine worked example", cosine_example);
  report("profile update oracle", profile_oracle);
  report("LDA topic separation", lda_separation);
  report("feedback improves retrieval", feedback_improves);
  report("invariant suites", invariants);
  report("core flows without the web UI", headless_http);
  return failures == 0 ? 0 : 1;
}
