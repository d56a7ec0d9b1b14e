#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "topicrec/topic_id.hpp"

namespace topicrec {

// Sparse vector over namespaced topics, kept sorted by TopicId. Raw bags
// (straight out of inference) hold non-negative integer counts; the
// preference vector and modified queries reuse the type with real weights.
// Explicit zeros are never stored.
class BagOfTopics {
 public:
  using Entry = std::pair<TopicId, double>;

  BagOfTopics() = default;
  BagOfTopics(std::initializer_list<Entry> entries);

  // Adds `delta` to the weight of `topic`; an entry that lands on exactly 0 is removed.
  void add(const TopicId& topic, double delta);
  void set(const TopicId& topic, double weight);
  void erase(const TopicId& topic);

  double weight(const TopicId& topic) const;
  bool contains(const TopicId& topic) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Sum of positive weights.
  double total_weight() const { return total_weight_; }
  double norm() const;

  // Copy with all entries <= 0 dropped.
  BagOfTopics positive_part() const;

  // "5 MAT1 + 6 CS3 + 2 HUM4"
  std::string to_string() const;

  friend BagOfTopics operator+(const BagOfTopics& a, const BagOfTopics& b);
  friend BagOfTopics operator*(double s, const BagOfTopics& a);
  friend bool operator==(const BagOfTopics& a, const BagOfTopics& b) { return a.entries_ == b.entries_; }

 private:
  void recompute_total();

  std::vector<Entry> entries_;
  double total_weight_ = 0.0;
};

// [{"topic": "CS3", "weight": 6}, ...] sorted by topic id.
nlohmann::json to_json(const BagOfTopics& bag);
BagOfTopics bag_from_json(const nlohmann::json& j);

}  // namespace topicrec
