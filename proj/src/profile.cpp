#include "topicrec/profile.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "topicrec/error.hpp"

namespace topicrec {

namespace {

constexpr int kProfileFormatVersion = 1;

std::string_view provenance_name(Provenance p) { return p == Provenance::FromQuery ? "query" : "feedback"; }

Provenance provenance_from(const std::string& s) {
  if (s == "query") return Provenance::FromQuery;
  if (s == "feedback") return Provenance::FromFeedback;
  throw Error(Errc::InvalidArgument, "unknown provenance '" + s + "'");
}

}  // namespace

void ProfileConfig::validate() const {
  if (!(out_of_query_rate > 0.0)) throw Error(Errc::InvalidConfig, "out-of-query rate must be > 0");
  if (!(in_query_rate > out_of_query_rate)) throw Error(Errc::InvalidConfig, "in-query rate must exceed out-of-query rate");
  if (!(staleness_penalty > in_query_rate)) throw Error(Errc::InvalidConfig, "staleness penalty must exceed in-query rate");
  if (update_every < 1) throw Error(Errc::InvalidConfig, "update interval must be >= 1");
  if (!(truncate_eps > 0.0)) throw Error(Errc::InvalidConfig, "truncation epsilon must be > 0");
}

double relative_frequency(const TopicId& topic, const BagOfTopics& bag) {
  if (!(bag.total_weight() > 0.0)) throw Error(Errc::ZeroNormBag, "relative frequency in an empty bag");
  return bag.weight(topic) / bag.total_weight();
}

ModifiedQuery modify_query(const BagOfTopics& q, UserProfile& profile) {
  ++profile.queries_since_update;
  ++profile.queries_total;
  return {q, q + profile.preference};
}

void record_feedback(UserProfile& profile, BagOfTopics query, std::vector<BagOfTopics> preferred) {
  profile.feedback_buffer.push_back({std::move(query), std::move(preferred)});
}

bool update_profile(UserProfile& profile, const ProfileConfig& config, bool force) {
  if (!force && profile.queries_since_update < config.update_every) return false;

  std::set<TopicId> preferred_this_cycle;
  for (const auto& entry : profile.feedback_buffer) {
    for (const auto& r : entry.preferred) {
      if (!(r.total_weight() > 0.0)) continue;
      for (const auto& [topic, w] : r.entries()) {
        if (w <= 0.0) continue;
        preferred_this_cycle.insert(topic);
        const double rf = relative_frequency(topic, r);
        const double factor = config.prominence_mode ? rf : 1.0 - rf;
        const bool in_query = entry.query.weight(topic) > 0.0;
        const double rate = in_query ? config.in_query_rate : config.out_of_query_rate;

        const bool existed = profile.preference.contains(topic);
        profile.preference.add(topic, rate * factor);
        if (in_query) {
          profile.provenance[topic] = Provenance::FromQuery;
          profile.staleness.erase(topic);
        } else if (!existed && !profile.provenance.contains(topic)) {
          profile.provenance[topic] = Provenance::FromFeedback;
        }
      }
    }
  }

  // Staleness applies to feedback-injected topics only.
  for (const auto& [topic, weight] : std::vector(profile.preference.entries())) {
    auto prov = profile.provenance.find(topic);
    if (prov == profile.provenance.end() || prov->second != Provenance::FromFeedback) continue;
    auto& age = profile.staleness[topic];
    age = preferred_this_cycle.contains(topic) ? 0 : age + 1;
    if (age >= config.staleness_threshold) profile.preference.add(topic, -config.staleness_penalty);
  }

  // Truncation, then drop bookkeeping for topics that left u.
  for (const auto& [topic, weight] : std::vector(profile.preference.entries())) {
    if (std::abs(weight) < config.truncate_eps) profile.preference.erase(topic);
  }
  std::erase_if(profile.staleness, [&](const auto& kv) { return !profile.preference.contains(kv.first); });
  std::erase_if(profile.provenance, [&](const auto& kv) { return !profile.preference.contains(kv.first); });

  profile.feedback_buffer.clear();
  profile.queries_since_update = 0;
  ++profile.updates_applied;
  return true;
}

nlohmann::json profile_to_json(const UserProfile& profile) {
  nlohmann::json j;
  j["format"] = "topicrec-profile";
  j["version"] = kProfileFormatVersion;
  j["user_id"] = profile.user_id;
  j["preference"] = to_json(profile.preference);
  j["queries_since_update"] = profile.queries_since_update;
  j["updates_applied"] = profile.updates_applied;
  j["queries_total"] = profile.queries_total;
  j["staleness"] = nlohmann::json::array();
  for (const auto& [t, s] : profile.staleness) j["staleness"].push_back({{"topic", t.to_string()}, {"cycles", s}});
  j["provenance"] = nlohmann::json::array();
  for (const auto& [t, p] : profile.provenance) {
    j["provenance"].push_back({{"topic", t.to_string()}, {"source", provenance_name(p)}});
  }
  j["feedback_buffer"] = nlohmann::json::array();
  for (const auto& entry : profile.feedback_buffer) {
    nlohmann::json e;
    e["query"] = to_json(entry.query);
    e["preferred"] = nlohmann::json::array();
    for (const auto& r : entry.preferred) e["preferred"].push_back(to_json(r));
    j["feedback_buffer"].push_back(std::move(e));
  }
  return j;
}

UserProfile profile_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "topicrec-profile" || j.value("version", 0) != kProfileFormatVersion) {
    throw Error(Errc::VersionMismatch, "unsupported profile format");
  }
  UserProfile p;
  p.user_id = j.at("user_id").get<std::string>();
  p.preference = bag_from_json(j.at("preference"));
  p.queries_since_update = j.at("queries_since_update").get<std::uint32_t>();
  p.updates_applied = j.at("updates_applied").get<std::uint64_t>();
  p.queries_total = j.at("queries_total").get<std::uint64_t>();
  for (const auto& s : j.at("staleness")) {
    p.staleness[TopicId::parse(s.at("topic").get<std::string>())] = s.at("cycles").get<std::uint32_t>();
  }
  for (const auto& s : j.at("provenance")) {
    p.provenance[TopicId::parse(s.at("topic").get<std::string>())] = provenance_from(s.at("source").get<std::string>());
  }
  for (const auto& e : j.at("feedback_buffer")) {
    FeedbackEntry entry{bag_from_json(e.at("query")), {}};
    for (const auto& r : e.at("preferred")) entry.preferred.push_back(bag_from_json(r));
    p.feedback_buffer.push_back(std::move(entry));
  }
  return p;
}

void persist_profile(const UserProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out << profile_to_json(profile).dump(1) << '\n';
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

UserProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::IoFailure, "cannot parse " + path.string() + ": " + e.what());
  }
  return profile_from_json(j);
}

}  // namespace topicrec
