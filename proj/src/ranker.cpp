#include "topicrec/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topicrec/error.hpp"
#include "topicrec/kernels.hpp"

namespace topicrec {

namespace detail {

// NaN when either bag has zero norm.
double cosine_or_nan(const BagOfTopics& q, const BagOfTopics& r) noexcept {
  const auto& a = q.entries();
  const auto& b = r.entries();
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& e : a) na += e.second * e.second;
  for (const auto& e : b) nb += e.second * e.second;
  if (na == 0.0 || nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace detail

double bot_cosine(const BagOfTopics& q, const BagOfTopics& r) {
  double s = detail::cosine_or_nan(q, r);
  if (std::isnan(s)) throw Error(Errc::ZeroNormBag, "cosine of a zero-norm bag of topics");
  return s;
}

std::vector<RankedResult> rank(const BagOfTopics& query, std::span<const Candidate> candidates, std::size_t k) {
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be >= 1");
  const std::vector<double> scores = kernels::score_candidates(query, candidates);
  std::vector<RankedResult> all;
  all.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!std::isnan(scores[i])) all.push_back({std::string(candidates[i].doc_id), scores[i]});
  }
  auto better = [](const RankedResult& a, const RankedResult& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  };
  const std::size_t n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), better);
  all.resize(n);
  return all;
}

}  // namespace topicrec
