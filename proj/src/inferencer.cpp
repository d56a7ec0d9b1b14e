#include "topicrec/inferencer.hpp"

#include <algorithm>
#include <vector>

#include "topicrec/error.hpp"
#include "topicrec/rng.hpp"

namespace topicrec {

BagOfTopics infer_bag_of_topics(const TokenStream& tokens, const DomainAssignment& assignment, const ModelSet& models) {
  if (assignment.domains.empty()) throw Error(Errc::InvalidArgument, "document has no assigned domain");
  std::map<TopicId, double> counts;
  for (const auto& d : assignment.domains) {
    auto it = models.find(d.domain);
    if (it == models.end()) throw Error(Errc::MissingModel, "no topic model for domain " + d.domain);
    const InvertedIndex& index = it->second.index;
    for (const auto& t : tokens.tokens) {
      if (const IndexEntry* e = index.find(t)) counts[index.topic_id(*e)] += 1.0;
    }
  }
  if (counts.empty()) {
    throw Error(Errc::EmptyResult, "no token of '" + tokens.source_doc_id + "' is in any assigned vocabulary");
  }
  BagOfTopics bag;
  for (const auto& [topic, c] : counts) bag.set(topic, c);
  return bag;
}

DocTopicVector fold_in_theta(const TokenStream& tokens, const TopicModel& model, std::uint32_t fold_iterations,
                             std::uint64_t seed) {
  std::vector<std::uint32_t> words;
  for (const auto& t : tokens.tokens) {
    if (auto id = model.vocabulary().id_of(t)) words.push_back(*id);
  }
  if (words.empty()) {
    throw Error(Errc::NoVocabularyOverlap, "'" + tokens.source_doc_id + "' shares no word with model " + model.domain());
  }
  std::sort(words.begin(), words.end());

  const std::size_t K = model.topics();
  const double alpha = model.config().effective_alpha();
  Rng rng(seed);
  std::vector<std::uint32_t> z(words.size()), n_k(K, 0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    z[i] = rng.below(static_cast<std::uint32_t>(K));
    ++n_k[z[i]];
  }
  std::vector<double> cumulative(K);
  for (std::uint32_t sweep = 0; sweep < fold_iterations; ++sweep) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --n_k[z[i]];
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        acc += (n_k[k] + alpha) * model.phi(k, words[i]);
        cumulative[k] = acc;
      }
      const double u = rng.uniform() * acc;
      auto k = static_cast<std::uint32_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      z[i] = std::min<std::uint32_t>(k, static_cast<std::uint32_t>(K - 1));
      ++n_k[z[i]];
    }
  }

  DocTopicVector out{tokens.source_doc_id, std::vector<double>(K)};
  const double denom = static_cast<double>(words.size()) + static_cast<double>(K) * alpha;
  for (std::size_t k = 0; k < K; ++k) out.theta[k] = (n_k[k] + alpha) / denom;
  return out;
}

}  // namespace topicrec
