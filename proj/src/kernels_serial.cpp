// Serial reference versions of the kernels in kernels.cpp.
#include "topicrec/error.hpp"
#include "topicrec/kernels.hpp"

namespace topicrec {
namespace detail {
double cosine_or_nan(const BagOfTopics& q, const BagOfTopics& r) noexcept;
}

namespace kernels {

namespace serial {

std::vector<IndexEntry> column_argmax(std::span<const double> phi, std::size_t rows, std::size_t cols) {
  if (phi.size() != rows * cols) throw Error(Errc::DimensionMismatch, "matrix size does not match its shape");
  std::vector<IndexEntry> best(cols);
  for (std::size_t w = 0; w < cols; ++w) {
    IndexEntry e{0, phi[w]};
    for (std::size_t t = 1; t < rows; ++t) {
      if (phi[t * cols + w] > e.probability) e = {static_cast<std::uint32_t>(t), phi[t * cols + w]};
    }
    best[w] = e;
  }
  return best;
}

std::vector<double> score_candidates(const BagOfTopics& query, std::span<const Candidate> candidates) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(detail::cosine_or_nan(query, *c.bag));
  return scores;
}

std::vector<std::optional<BagOfTopics>> infer_bags(std::span<const TokenStream> docs,
                                                   std::span<const DomainAssignment> assignments,
                                                   const ModelSet& models) {
  if (docs.size() != assignments.size()) throw Error(Errc::InvalidArgument, "one assignment per document required");
  std::vector<std::optional<BagOfTopics>> out;
  out.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    try {
      out.emplace_back(infer_bag_of_topics(docs[i], assignments[i], models));
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyResult) throw;
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace serial

}  // namespace kernels
}  // namespace topicrec
