#include "topicrec/bag_of_topics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "topicrec/error.hpp"

namespace topicrec {

bool is_valid_domain_tag(std::string_view tag) {
  if (tag.empty() || tag.size() > 4) return false;
  return std::all_of(tag.begin(), tag.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::string TopicId::to_string() const { return domain + std::to_string(index); }

TopicId TopicId::parse(std::string_view text) {
  std::size_t split = 0;
  while (split < text.size() && text[split] >= 'A' && text[split] <= 'Z') ++split;
  std::string_view tag = text.substr(0, split);
  std::string_view digits = text.substr(split);
  std::uint32_t index = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (!is_valid_domain_tag(tag) || digits.empty() || ec != std::errc() ||
      ptr != digits.data() + digits.size()) {
    throw Error(Errc::InvalidArgument, "malformed topic id '" + std::string(text) + "'");
  }
  return TopicId{std::string(tag), index};
}

namespace {

auto find_entry(std::vector<BagOfTopics::Entry>& entries, const TopicId& topic) {
  return std::lower_bound(entries.begin(), entries.end(), topic,
                          [](const BagOfTopics::Entry& e, const TopicId& t) { return e.first < t; });
}

auto find_entry(const std::vector<BagOfTopics::Entry>& entries, const TopicId& topic) {
  return std::lower_bound(entries.begin(), entries.end(), topic,
                          [](const BagOfTopics::Entry& e, const TopicId& t) { return e.first < t; });
}

}  // namespace

BagOfTopics::BagOfTopics(std::initializer_list<Entry> entries) {
  for (const auto& [topic, w] : entries) add(topic, w);
}

void BagOfTopics::add(const TopicId& topic, double delta) {
  auto it = find_entry(entries_, topic);
  if (it != entries_.end() && it->first == topic) {
    it->second += delta;
    if (it->second == 0.0) entries_.erase(it);
  } else if (delta != 0.0) {
    entries_.insert(it, Entry{topic, delta});
  }
  recompute_total();
}

void BagOfTopics::set(const TopicId& topic, double weight) {
  auto it = find_entry(entries_, topic);
  bool present = it != entries_.end() && it->first == topic;
  if (weight == 0.0) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->second = weight;
  } else {
    entries_.insert(it, Entry{topic, weight});
  }
  recompute_total();
}

void BagOfTopics::erase(const TopicId& topic) { set(topic, 0.0); }

double BagOfTopics::weight(const TopicId& topic) const {
  auto it = find_entry(entries_, topic);
  return (it != entries_.end() && it->first == topic) ? it->second : 0.0;
}

bool BagOfTopics::contains(const TopicId& topic) const {
  auto it = find_entry(entries_, topic);
  return it != entries_.end() && it->first == topic;
}

double BagOfTopics::norm() const {
  double sq = 0.0;
  for (const auto& e : entries_) sq += e.second * e.second;
  return std::sqrt(sq);
}

BagOfTopics BagOfTopics::positive_part() const {
  BagOfTopics out;
  for (const auto& e : entries_) {
    if (e.second > 0.0) out.entries_.push_back(e);
  }
  out.recompute_total();
  return out;
}

std::string BagOfTopics::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [topic, w] : entries_) {
    if (!first) os << " + ";
    os << w << ' ' << topic.to_string();
    first = false;
  }
  return os.str();
}

void BagOfTopics::recompute_total() {
  total_weight_ = 0.0;
  for (const auto& e : entries_) {
    if (e.second > 0.0) total_weight_ += e.second;
  }
}

BagOfTopics operator+(const BagOfTopics& a, const BagOfTopics& b) {
  BagOfTopics out;
  auto ia = a.entries_.begin();
  auto ib = b.entries_.begin();
  auto push = [&out](const TopicId& t, double w) {
    if (w != 0.0) out.entries_.push_back({t, w});
  };
  while (ia != a.entries_.end() || ib != b.entries_.end()) {
    if (ib == b.entries_.end() || (ia != a.entries_.end() && ia->first < ib->first)) {
      push(ia->first, ia->second);
      ++ia;
    } else if (ia == a.entries_.end() || ib->first < ia->first) {
      push(ib->first, ib->second);
      ++ib;
    } else {
      push(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  out.recompute_total();
  return out;
}

BagOfTopics operator*(double s, const BagOfTopics& a) {
  BagOfTopics out;
  if (s == 0.0) return out;
  out.entries_ = a.entries_;
  for (auto& e : out.entries_) e.second *= s;
  out.recompute_total();
  return out;
}

nlohmann::json to_json(const BagOfTopics& bag) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [topic, w] : bag.entries()) {
    j.push_back({{"topic", topic.to_string()}, {"weight", w}});
  }
  return j;
}

BagOfTopics bag_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(Errc::InvalidArgument, "bag of topics must be a JSON array");
  BagOfTopics bag;
  for (const auto& e : j) {
    bag.add(TopicId::parse(e.at("topic").get<std::string>()), e.at("weight").get<double>());
  }
  return bag;
}

}  // namespace topicrec
