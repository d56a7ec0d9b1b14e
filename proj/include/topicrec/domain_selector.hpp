#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "topicrec/embeddings.hpp"
#include "topicrec/preprocess.hpp"

namespace topicrec {

inline constexpr double kDefaultDomainThreshold = 0.35;
inline constexpr std::size_t kDefaultTopWords = 100;

struct LabeledTokens {
  TokenStream tokens;
  std::string domain;
};

struct DomainModel {
  std::map<std::string, Vector> domains;  // tag -> representative vector
  double threshold = kDefaultDomainThreshold;
  std::size_t top_m = kDefaultTopWords;

  void save(const std::filesystem::path& path) const;
  static DomainModel load(const std::filesystem::path& path);
};

struct DomainScore {
  std::string domain;
  double score = 0.0;

  friend bool operator==(const DomainScore&, const DomainScore&) = default;
};

struct DomainAssignment {
  std::string doc_id;
  std::vector<DomainScore> domains;  // score desc, tag asc on ties

  bool has(const std::string& tag) const;
};

// Per domain: rank the in-vocabulary words of its documents by TF-IDF (IDF
// over all labeled entries), keep the top `top_m` and sum their embeddings.
DomainModel build_domain_vectors(std::span<const LabeledTokens> labeled, const EmbeddingStore& store,
                                 std::size_t top_m = kDefaultTopWords,
                                 double threshold = kDefaultDomainThreshold);

// Document vector = sum of token embeddings (every occurrence). Returns every
// domain whose cosine clears the threshold, or the single best domain when
// none does.
DomainAssignment assign_domains(const TokenStream& doc, const DomainModel& model, const EmbeddingStore& store);

}  // namespace topicrec
