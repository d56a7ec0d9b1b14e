#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (used by the
// library) and a plain serial version in `kernels::serial`, kept as the
// reference the tests and benchmarks compare against.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "topicrec/bag_of_topics.hpp"
#include "topicrec/domain_selector.hpp"
#include "topicrec/inferencer.hpp"
#include "topicrec/ranker.hpp"
#include "topicrec/topic_model.hpp"

namespace topicrec::kernels {

// Per column of a row-major K x V matrix: (row of the maximum, value);
// lowest row wins ties.
std::vector<IndexEntry> column_argmax(std::span<const double> phi, std::size_t rows, std::size_t cols);

// bot_cosine of the query against each candidate; NaN marks a zero-norm candidate.
std::vector<double> score_candidates(const BagOfTopics& query, std::span<const Candidate> candidates);

// infer_bag_of_topics per document; nullopt where the document is
// unindexable (EmptyResult). Other errors propagate.
std::vector<std::optional<BagOfTopics>> infer_bags(std::span<const TokenStream> docs,
                                                   std::span<const DomainAssignment> assignments,
                                                   const ModelSet& models);

namespace serial {

std::vector<IndexEntry> column_argmax(std::span<const double> phi, std::size_t rows, std::size_t cols);
std::vector<double> score_candidates(const BagOfTopics& query, std::span<const Candidate> candidates);
std::vector<std::optional<BagOfTopics>> infer_bags(std::span<const TokenStream> docs,
                                                   std::span<const DomainAssignment> assignments,
                                                   const ModelSet& models);

}  // namespace serial

// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace topicrec::kernels
