#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicrec/engine.hpp"

namespace topicrec {

// |S ∩ P| / |S ∪ P|. Throws BothEmpty.
double jaccard(const std::set<std::string>& s, const std::set<std::string>& p);

enum class FeedbackPolicy {
  PreferIntersection,  // mark retrieved ∩ desired
  PreferNothing,
};

struct EvalUser {
  std::string id;
  std::string query;
  std::set<std::string> desired;
  FeedbackPolicy policy = FeedbackPolicy::PreferIntersection;
};

struct EvalSpec {
  std::vector<EvalUser> users;
  std::size_t iterations = 10;
  std::size_t k = kDefaultResultCount;

  void validate() const;
};

struct UserResult {
  std::string user_id;
  double jaccard_q = 0.0;
  double jaccard_q_prime = 0.0;
};

struct EvalReport {
  std::vector<UserResult> users;
  std::size_t improved_count = 0;
  std::size_t total_users = 0;

  friend bool operator==(const EvalReport& a, const EvalReport& b) {
    if (a.improved_count != b.improved_count || a.total_users != b.total_users || a.users.size() != b.users.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.users.size(); ++i) {
      if (a.users[i].user_id != b.users[i].user_id || a.users[i].jaccard_q != b.users[i].jaccard_q ||
          a.users[i].jaccard_q_prime != b.users[i].jaccard_q_prime) {
        return false;
      }
    }
    return true;
  }
};

// {"iterations": 10, "k": 10, "users": [{"id", "query", "desired": [...], "policy"?}]}
EvalSpec eval_spec_from_json(const nlohmann::json& j);
EvalSpec load_eval_spec(const std::filesystem::path& path);

// For each user, starting from an empty profile: Jaccard of top-k(q) against
// the desired set; then `iterations` rounds of query + scripted feedback;
// finally Jaccard of top-k(q'). Users run independently (in parallel).
// Throws UnknownDoc when a desired id is not in the corpus.
EvalReport run_session(const EvalSpec& spec, Engine& engine);

nlohmann::json to_json(const EvalReport& report);
std::string format_table(const EvalReport& report);

}  // namespace topicrec
