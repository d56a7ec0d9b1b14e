#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topicrec/bag_of_topics.hpp"
#include "topicrec/domain_selector.hpp"
#include "topicrec/embeddings.hpp"
#include "topicrec/inferencer.hpp"
#include "topicrec/preprocess.hpp"

namespace topicrec {

struct Document {
  std::string id;
  std::string title;
  std::string text;
  std::vector<std::string> domains;
  bool labeled = false;  // domains came from the corpus file

  // Filled by indexing.
  TokenStream tokens;
  std::uint64_t tokens_fingerprint = 0;  // preprocess config the tokens were built with
  BagOfTopics bag;
  bool indexed = false;
  bool unindexable = false;
};

struct LineError {
  std::size_t line = 0;
  std::string message;
};

struct ParsedCorpus {
  std::vector<Document> documents;
  std::vector<LineError> errors;
  std::vector<std::string> duplicate_ids;  // repeated within the input
};

// JSON Lines: {"id": str, "title": str?, "text": str, "domains": [str]?}.
// Blank lines are ignored. Never throws on content; problems are reported.
ParsedCorpus parse_corpus(std::string_view jsonl);

class CorpusStore {
 public:
  // Throws DuplicateId.
  void add(Document doc);
  const Document* find(std::string_view id) const;
  Document* find_mutable(std::string_view id);
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  // Replaces the document's domain list and keeps by_domain in sync.
  void set_domains(std::string_view id, std::vector<std::string> domains);

  const std::map<std::string, Document, std::less<>>& documents() const { return documents_; }
  std::map<std::string, Document, std::less<>>& documents_mutable() { return documents_; }
  const std::set<std::string>& by_domain(const std::string& tag) const;
  const std::map<std::string, std::set<std::string>>& domain_index() const { return by_domain_; }
  std::size_t size() const { return documents_.size(); }

  // True when by_domain is exactly the inverse of the documents' domain lists.
  bool check_consistency() const;

 private:
  std::map<std::string, Document, std::less<>> documents_;
  std::map<std::string, std::set<std::string>> by_domain_;
};

// Throws MalformedLine (with line number), DuplicateId, IoFailure.
CorpusStore ingest_corpus(const std::filesystem::path& path);
// Same as ingest_corpus for in-memory text.
CorpusStore ingest_corpus_text(std::string_view jsonl);

struct IndexStats {
  std::size_t indexed = 0;
  std::size_t unindexable = 0;
};

// Gives every document its domains (labels are kept when a model exists for
// them, otherwise assign_domains) and a bag of topics. Documents that cannot
// be represented are flagged, not dropped. Throws MissingModel.
IndexStats index_corpus(CorpusStore& store, const Preprocessor& preprocessor, const DomainModel& domain_model,
                        const EmbeddingStore& embeddings, const ModelSet& models);

// corpus.jsonl + index.json sidecar (tokens, domains, bags).
void save_store(const CorpusStore& store, const std::filesystem::path& dir, std::uint64_t preprocess_fingerprint);
CorpusStore load_store(const std::filesystem::path& dir);

}  // namespace topicrec
