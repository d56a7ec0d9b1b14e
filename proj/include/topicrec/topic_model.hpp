#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "topicrec/preprocess.hpp"
#include "topicrec/topic_id.hpp"

namespace topicrec {

struct LdaConfig {
  std::uint32_t topics = 20;
  std::optional<double> alpha;  // symmetric doc-topic prior; 50/topics when unset
  double beta = 0.01;
  std::uint32_t iterations = 500;
  std::uint64_t seed = 1;
  std::uint32_t min_doc_freq = 2;  // clamped to the number of documents
  std::uint32_t max_vocab = 100000;

  double effective_alpha() const { return alpha.value_or(50.0 / static_cast<double>(topics)); }
  // Throws InvalidConfig.
  void validate() const;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Words must be unique; ids follow the given order.
  explicit Vocabulary(std::vector<std::string> words);

  std::optional<std::uint32_t> id_of(std::string_view word) const;
  const std::string& word(std::uint32_t id) const { return words_[id]; }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// Topic-word distributions of one domain. phi is dense row-major K x V.
class TopicModel {
 public:
  TopicModel() = default;
  // Checks shapes and row-stochasticity (1e-9). K >= 1 is accepted here so
  // hand-built fixtures can be degenerate; training requires K >= 2.
  TopicModel(std::string domain_tag, Vocabulary vocab, std::vector<double> phi,
             std::vector<double> corpus_topic_weights, LdaConfig config);

  const std::string& domain() const { return domain_; }
  std::size_t topics() const { return topics_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const LdaConfig& config() const { return config_; }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& corpus_topic_weights() const { return topic_weights_; }

  double phi(std::size_t topic, std::size_t word) const { return phi_[topic * vocab_.size() + word]; }
  std::span<const double> phi_row(std::size_t topic) const {
    return {phi_.data() + topic * vocab_.size(), vocab_.size()};
  }

  TopicId topic_id(std::uint32_t index) const { return TopicId{domain_, index}; }

 private:
  std::string domain_;
  std::size_t topics_ = 0;
  Vocabulary vocab_;
  std::vector<double> phi_;
  std::vector<double> topic_weights_;
  LdaConfig config_;
};

struct DocTopicVector {
  std::string doc_id;
  std::vector<double> theta;
};

struct IndexEntry {
  std::uint32_t topic = 0;
  double probability = 0.0;

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

// word -> most probable topic under phi (lowest index on ties) and P(word|topic).
class InvertedIndex {
 public:
  InvertedIndex() = default;
  InvertedIndex(std::string domain, std::unordered_map<std::string, IndexEntry> entries)
      : domain_(std::move(domain)), entries_(std::move(entries)) {}

  const IndexEntry* find(std::string_view word) const;
  TopicId topic_id(const IndexEntry& e) const { return TopicId{domain_, e.topic}; }

  const std::string& domain() const { return domain_; }
  const std::unordered_map<std::string, IndexEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

 private:
  std::string domain_;
  std::unordered_map<std::string, IndexEntry> entries_;
};

struct LdaResult {
  TopicModel model;
  std::vector<DocTopicVector> doc_topics;
  // Final sampler state, exposed for count-level invariants.
  std::vector<std::uint32_t> topic_word_counts;  // K x V
  std::vector<std::uint32_t> doc_topic_counts;   // D x K
};

// Collapsed Gibbs sampling. Each document's in-vocabulary tokens are sorted
// by vocabulary id before sampling, so the result depends only on token
// counts. Deterministic for a given seed.
LdaResult train_lda(std::span<const TokenStream> corpus, const LdaConfig& config, const std::string& domain_tag);

InvertedIndex build_inverted_index(const TopicModel& model);

struct LoadedModel {
  TopicModel model;
  InvertedIndex index;
};

void save_model(const TopicModel& model, const std::filesystem::path& path);
// The index is rebuilt from phi. Throws IoFailure, VersionMismatch, ChecksumMismatch.
LoadedModel load_model(const std::filesystem::path& path);

std::vector<unsigned char> serialize_model(const TopicModel& model);
TopicModel deserialize_model(std::span<const unsigned char> bytes);

inline constexpr std::uint32_t kModelFormatVersion = 1;

}  // namespace topicrec
