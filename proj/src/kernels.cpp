#include "topicrec/kernels.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "topicrec/error.hpp"

namespace topicrec {
namespace detail {
double cosine_or_nan(const BagOfTopics& q, const BagOfTopics& r) noexcept;
}

namespace kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<IndexEntry> column_argmax(std::span<const double> phi, std::size_t rows, std::size_t cols) {
  if (phi.size() != rows * cols) throw Error(Errc::DimensionMismatch, "matrix size does not match its shape");
  std::vector<IndexEntry> best(cols);
  const auto n = static_cast<std::ptrdiff_t>(cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t w = 0; w < n; ++w) {
    IndexEntry e{0, phi[static_cast<std::size_t>(w)]};
    for (std::size_t t = 1; t < rows; ++t) {
      const double p = phi[t * cols + static_cast<std::size_t>(w)];
      if (p > e.probability) e = {static_cast<std::uint32_t>(t), p};
    }
    best[static_cast<std::size_t>(w)] = e;
  }
  return best;
}

std::vector<double> score_candidates(const BagOfTopics& query, std::span<const Candidate> candidates) {
  std::vector<double> scores(candidates.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& c = candidates[static_cast<std::size_t>(i)];
    scores[static_cast<std::size_t>(i)] = detail::cosine_or_nan(query, *c.bag);
  }
  return scores;
}

std::vector<std::optional<BagOfTopics>> infer_bags(std::span<const TokenStream> docs,
                                                   std::span<const DomainAssignment> assignments,
                                                   const ModelSet& models) {
  if (docs.size() != assignments.size()) throw Error(Errc::InvalidArgument, "one assignment per document required");
  std::vector<std::optional<BagOfTopics>> out(docs.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      out[idx] = infer_bag_of_topics(docs[idx], assignments[idx], models);
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyResult) {
#pragma omp critical(topicrec_infer_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace kernels
}  // namespace topicrec
