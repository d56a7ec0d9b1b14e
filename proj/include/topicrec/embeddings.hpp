#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace topicrec {

using Vector = std::vector<double>;

// Pre-trained word vectors in word2vec text format:
//   <count> <dim>
//   <word> <f1> ... <fdim>
// Words are case-folded on load; a repeated word replaces the earlier row.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim = 1);

  static EmbeddingStore parse(std::istream& in);
  static EmbeddingStore load(const std::filesystem::path& path);

  void insert(std::string_view word, Vector vec);
  // Writes the store back in text format, rows sorted by word.
  void save(const std::filesystem::path& path) const;

  // Lookup after lowercasing; nullopt for out-of-vocabulary words.
  std::optional<std::span<const double>> vector_of(std::string_view word) const;

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  std::size_t duplicates() const { return duplicates_; }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, Vector> vectors_;
  std::size_t duplicates_ = 0;
};

// a.b / (|a||b|). Throws DimensionMismatch or ZeroVector.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace topicrec
