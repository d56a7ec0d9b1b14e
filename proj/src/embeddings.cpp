#include "topicrec/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "topicrec/error.hpp"

namespace topicrec {

namespace {

std::string fold(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool parse_size(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(Errc::MalformedHeader, "embedding dimension must be >= 1");
}

EmbeddingStore EmbeddingStore::parse(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(Errc::MalformedHeader, "missing embedding header");
  std::istringstream hs(header);
  std::string count_s, dim_s, extra;
  std::size_t count = 0, dim = 0;
  if (!(hs >> count_s >> dim_s) || (hs >> extra) || !parse_size(count_s, count) || !parse_size(dim_s, dim) ||
      dim == 0) {
    throw Error(Errc::MalformedHeader, "embedding header must be '<count> <dim>', got '" + header + "'");
  }

  EmbeddingStore store(dim);
  std::string line;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    Vector vec;
    vec.reserve(dim);
    for (std::string tok; ls >> tok;) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw Error(Errc::DimensionMismatch, "line " + std::to_string(line_no) + ": non-numeric component '" + tok + "'",
                    line_no);
      }
      vec.push_back(v);
    }
    if (vec.size() != dim) {
      throw Error(Errc::DimensionMismatch,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " components, got " +
                      std::to_string(vec.size()),
                  line_no);
    }
    store.insert(word, std::move(vec));
    ++rows;
  }
  if (in.bad()) throw Error(Errc::IoFailure, "read error while loading embeddings");
  if (rows != count) {
    throw Error(Errc::MalformedHeader,
                "header declares " + std::to_string(count) + " rows, file has " + std::to_string(rows));
  }
  return store;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open embeddings file " + path.string());
  return parse(in);
}

void EmbeddingStore::insert(std::string_view word, Vector vec) {
  if (vec.size() != dim_) throw Error(Errc::DimensionMismatch, "vector for '" + std::string(word) + "' has wrong length");
  auto [it, inserted] = vectors_.insert_or_assign(fold(word), std::move(vec));
  if (!inserted) {
    ++duplicates_;
    std::clog << "warning: duplicate embedding for '" << it->first << "', keeping the last row\n";
  }
}

void EmbeddingStore::save(const std::filesystem::path& path) const {
  std::vector<const std::pair<const std::string, Vector>*> rows;
  rows.reserve(vectors_.size());
  for (const auto& kv : vectors_) rows.push_back(&kv);
  std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) { return a->first < b->first; });
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out << rows.size() << ' ' << dim_ << '\n';
  out.precision(17);
  for (const auto* row : rows) {
    out << row->first;
    for (double v : row->second) out << ' ' << v;
    out << '\n';
  }
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

std::optional<std::span<const double>> EmbeddingStore::vector_of(std::string_view word) const {
  auto it = vectors_.find(fold(word));
  if (it == vectors_.end()) return std::nullopt;
  return std::span<const double>(it->second);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "cosine of vectors with different lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(Errc::ZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace topicrec
