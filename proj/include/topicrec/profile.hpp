#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicrec/bag_of_topics.hpp"

namespace topicrec {

enum class Provenance { FromQuery, FromFeedback };

struct FeedbackEntry {
  BagOfTopics query;  // the user's own query bag, before q + u
  std::vector<BagOfTopics> preferred;

  friend bool operator==(const FeedbackEntry&, const FeedbackEntry&) = default;
};

struct UserProfile {
  std::string user_id;
  BagOfTopics preference;  // u; weights may be negative, never exactly 0
  std::vector<FeedbackEntry> feedback_buffer;
  std::uint32_t queries_since_update = 0;
  std::map<TopicId, std::uint32_t> staleness;  // FromFeedback topics only
  std::map<TopicId, Provenance> provenance;
  std::uint64_t updates_applied = 0;
  std::uint64_t queries_total = 0;

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct ProfileConfig {
  double in_query_rate = 0.1;        // reinforcement for topics already in the query
  double out_of_query_rate = 0.05;   // reinforcement for topics the query lacks
  double staleness_penalty = 0.2;    // subtracted once a feedback topic goes stale
  std::uint32_t update_every = 1;    // queries per profile update
  std::uint32_t staleness_threshold = 3;  // update cycles without preference before penalizing
  double truncate_eps = 0.01;
  // Weight updates by relative frequency instead of (1 - relative frequency).
  bool prominence_mode = false;

  // in_query_rate > out_of_query_rate > 0, staleness_penalty > in_query_rate,
  // update_every >= 1, truncate_eps > 0. Throws InvalidConfig.
  void validate() const;
};

struct ModifiedQuery {
  BagOfTopics original;
  BagOfTopics modified;  // original + u, zeros removed
};

// weight(topic) / total_weight; 0 when absent. Throws ZeroNormBag.
double relative_frequency(const TopicId& topic, const BagOfTopics& bag);

// q' = q + u. Counts the query towards the next profile update.
ModifiedQuery modify_query(const BagOfTopics& q, UserProfile& profile);

void record_feedback(UserProfile& profile, BagOfTopics query, std::vector<BagOfTopics> preferred);

// Applies the buffered feedback:
//   u[t] += rate * (1 - relfreq(t, r)) for every topic t of every preferred r,
// with rate = in_query_rate when t is in that entry's query, else
// out_of_query_rate. Then feedback-injected topics absent from every preferred
// bag age by one cycle and, once stale for `staleness_threshold` cycles, lose
// `staleness_penalty` per cycle. Entries below `truncate_eps` in magnitude are
// dropped. Returns false (and changes nothing) when fewer than `update_every`
// queries were seen and `force` is off.
bool update_profile(UserProfile& profile, const ProfileConfig& config, bool force = false);

nlohmann::json profile_to_json(const UserProfile& profile);
UserProfile profile_from_json(const nlohmann::json& j);

void persist_profile(const UserProfile& profile, const std::filesystem::path& path);
// Throws IoFailure, VersionMismatch.
UserProfile load_profile(const std::filesystem::path& path);

}  // namespace topicrec
