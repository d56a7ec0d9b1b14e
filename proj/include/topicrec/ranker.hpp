#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicrec/bag_of_topics.hpp"

namespace topicrec {

inline constexpr std::size_t kDefaultResultCount = 10;

struct RankedResult {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const RankedResult&, const RankedResult&) = default;
};

// Non-owning view of a scorable document.
struct Candidate {
  std::string_view doc_id;
  const BagOfTopics* bag = nullptr;
};

// Cosine over the union of topic ids; topics from different domains are
// orthogonal. Throws ZeroNormBag.
double bot_cosine(const BagOfTopics& q, const BagOfTopics& r);

// Top-k by cosine, score desc then doc_id asc. Zero-norm candidates are
// skipped. Scoring runs in parallel.
std::vector<RankedResult> rank(const BagOfTopics& query, std::span<const Candidate> candidates,
                               std::size_t k = kDefaultResultCount);

}  // namespace topicrec
