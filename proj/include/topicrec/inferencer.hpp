#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "topicrec/bag_of_topics.hpp"
#include "topicrec/domain_selector.hpp"
#include "topicrec/preprocess.hpp"
#include "topicrec/topic_model.hpp"

namespace topicrec {

struct DomainTopicModel {
  TopicModel model;
  InvertedIndex index;
};

using ModelSet = std::map<std::string, DomainTopicModel>;

// Every in-vocabulary token adds 1 to its argmax topic, once per assigned
// domain. Throws MissingModel or EmptyResult.
BagOfTopics infer_bag_of_topics(const TokenStream& tokens, const DomainAssignment& assignment, const ModelSet& models);

// Gibbs fold-in with phi held fixed. Throws NoVocabularyOverlap.
DocTopicVector fold_in_theta(const TokenStream& tokens, const TopicModel& model, std::uint32_t fold_iterations,
                             std::uint64_t seed);

}  // namespace topicrec
