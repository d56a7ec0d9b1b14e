#include "topicrec/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <sstream>

#include "topicrec/error.hpp"

namespace topicrec {

double jaccard(const std::set<std::string>& s, const std::set<std::string>& p) {
  if (s.empty() && p.empty()) throw Error(Errc::BothEmpty, "jaccard of two empty sets");
  std::vector<std::string> inter;
  std::set_intersection(s.begin(), s.end(), p.begin(), p.end(), std::back_inserter(inter));
  const double uni = static_cast<double>(s.size() + p.size() - inter.size());
  return static_cast<double>(inter.size()) / uni;
}

void EvalSpec::validate() const {
  if (iterations < 1) throw Error(Errc::InvalidConfig, "iterations must be >= 1");
  if (k < 1) throw Error(Errc::InvalidConfig, "k must be >= 1");
  for (const auto& u : users) {
    if (u.desired.empty()) throw Error(Errc::InvalidConfig, "user " + u.id + " has an empty desired set");
  }
}

EvalSpec eval_spec_from_json(const nlohmann::json& j) {
  EvalSpec spec;
  spec.iterations = j.value("iterations", std::size_t{10});
  spec.k = j.value("k", kDefaultResultCount);
  for (const auto& u : j.at("users")) {
    EvalUser user;
    user.id = u.at("id").get<std::string>();
    user.query = u.at("query").get<std::string>();
    for (const auto& d : u.at("desired")) user.desired.insert(d.get<std::string>());
    const std::string policy = u.value("policy", "prefer_intersection");
    if (policy == "prefer_intersection") {
      user.policy = FeedbackPolicy::PreferIntersection;
    } else if (policy == "prefer_nothing") {
      user.policy = FeedbackPolicy::PreferNothing;
    } else {
      throw Error(Errc::InvalidConfig, "unknown feedback policy '" + policy + "'");
    }
    spec.users.push_back(std::move(user));
  }
  return spec;
}

EvalSpec load_eval_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  try {
    return eval_spec_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, "malformed eval spec " + path.string() + ": " + e.what());
  }
}

namespace {

std::set<std::string> ids_of(const std::vector<RankedResult>& results) {
  std::set<std::string> ids;
  for (const auto& r : results) ids.insert(r.doc_id);
  return ids;
}

UserResult run_user(const EvalUser& user, const EvalSpec& spec, Engine& engine) {
  const std::string uid = "eval:" + user.id;
  engine.reset_user(uid);

  UserResult out{user.id, 0.0, 0.0};
  out.jaccard_q = jaccard(ids_of(engine.rank_bag(engine.represent(user.query), spec.k)), user.desired);

  for (std::size_t round = 0; round < spec.iterations; ++round) {
    QueryOutcome q = engine.query(uid, user.query, spec.k);
    std::vector<std::string> preferred;
    if (user.policy == FeedbackPolicy::PreferIntersection) {
      for (const auto& r : q.results) {
        if (user.desired.contains(r.doc_id)) preferred.push_back(r.doc_id);
      }
    }
    engine.feedback(uid, q.query_id, preferred);
  }

  QueryOutcome final_query = engine.query(uid, user.query, spec.k);
  out.jaccard_q_prime = jaccard(ids_of(final_query.results), user.desired);
  return out;
}

}  // namespace

EvalReport run_session(const EvalSpec& spec, Engine& engine) {
  spec.validate();
  for (const auto& u : spec.users) {
    for (const auto& d : u.desired) {
      if (!engine.document(d)) throw Error(Errc::UnknownDoc, "desired document \"" + d + "\" is not in the corpus");
    }
  }

  EvalReport report;
  report.users.resize(spec.users.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(spec.users.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      report.users[idx] = run_user(spec.users[idx], spec, engine);
    } catch (...) {
#pragma omp critical(topicrec_eval_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  report.total_users = report.users.size();
  report.improved_count = static_cast<std::size_t>(std::count_if(
      report.users.begin(), report.users.end(), [](const UserResult& u) { return u.jaccard_q_prime > u.jaccard_q; }));
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["users"] = nlohmann::json::array();
  for (const auto& u : report.users) {
    j["users"].push_back({{"user", u.user_id}, {"jaccard_q", u.jaccard_q}, {"jaccard_q_prime", u.jaccard_q_prime}});
  }
  j["improved_count"] = report.improved_count;
  j["total_users"] = report.total_users;
  return j;
}

std::string format_table(const EvalReport& report) {
  std::size_t width = 4;
  for (const auto& u : report.users) width = std::max(width, u.user_id.size());
  std::ostringstream os;
  char buf[64];
  os << "user" << std::string(width - 4, ' ') << "  jaccard(q)  jaccard(q')  improved\n";
  for (const auto& u : report.users) {
    std::snprintf(buf, sizeof buf, "  %10.4f  %11.4f  %s", u.jaccard_q, u.jaccard_q_prime,
                  u.jaccard_q_prime > u.jaccard_q ? "yes" : "no");
    os << u.user_id << std::string(width - u.user_id.size(), ' ') << buf << '\n';
  }
  os << "improved: " << report.improved_count << " / " << report.total_users << '\n';
  return os.str();
}

}  // namespace topicrec
