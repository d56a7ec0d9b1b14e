#include "topicrec/store.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "topicrec/error.hpp"
#include "topicrec/kernels.hpp"

namespace topicrec {

namespace {

constexpr int kIndexFormatVersion = 1;
const std::set<std::string> kNoDocs;

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

std::optional<Document> parse_line(std::string_view line, std::string& error) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    error = std::string("invalid JSON: ") + e.what();
    return std::nullopt;
  }
  if (!j.is_object()) {
    error = "line is not a JSON object";
    return std::nullopt;
  }
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
    error = "missing or empty string field \"id\"";
    return std::nullopt;
  }
  if (!j.contains("text") || !j["text"].is_string()) {
    error = "missing string field \"text\"";
    return std::nullopt;
  }
  Document doc;
  doc.id = j["id"].get<std::string>();
  doc.text = j["text"].get<std::string>();
  if (j.contains("title")) {
    if (!j["title"].is_string()) {
      error = "\"title\" must be a string";
      return std::nullopt;
    }
    doc.title = j["title"].get<std::string>();
  }
  if (j.contains("domains") && !j["domains"].is_null()) {
    if (!j["domains"].is_array()) {
      error = "\"domains\" must be an array of strings";
      return std::nullopt;
    }
    for (const auto& d : j["domains"]) {
      if (!d.is_string() || !is_valid_domain_tag(d.get<std::string>())) {
        error = "invalid domain tag in \"domains\"";
        return std::nullopt;
      }
      doc.domains.push_back(d.get<std::string>());
    }
    std::sort(doc.domains.begin(), doc.domains.end());
    doc.domains.erase(std::unique(doc.domains.begin(), doc.domains.end()), doc.domains.end());
    doc.labeled = !doc.domains.empty();
  }
  return doc;
}

}  // namespace

ParsedCorpus parse_corpus(std::string_view jsonl) {
  ParsedCorpus out;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    std::string error;
    auto doc = parse_line(line, error);
    if (!doc) {
      out.errors.push_back({line_no, error});
      continue;
    }
    if (!seen.insert(doc->id).second) {
      out.duplicate_ids.push_back(doc->id);
      out.errors.push_back({line_no, "duplicate id \"" + doc->id + "\""});
      continue;
    }
    out.documents.push_back(std::move(*doc));
  }
  return out;
}

void CorpusStore::add(Document doc) {
  if (documents_.contains(doc.id)) throw Error(Errc::DuplicateId, "duplicate document id \"" + doc.id + "\"");
  for (const auto& d : doc.domains) by_domain_[d].insert(doc.id);
  std::string id = doc.id;
  documents_.emplace(std::move(id), std::move(doc));
}

const Document* CorpusStore::find(std::string_view id) const {
  auto it = documents_.find(id);
  return it == documents_.end() ? nullptr : &it->second;
}

Document* CorpusStore::find_mutable(std::string_view id) {
  auto it = documents_.find(id);
  return it == documents_.end() ? nullptr : &it->second;
}

void CorpusStore::set_domains(std::string_view id, std::vector<std::string> domains) {
  Document* doc = find_mutable(id);
  if (doc == nullptr) throw Error(Errc::UnknownDoc, "unknown document \"" + std::string(id) + "\"");
  for (const auto& d : doc->domains) {
    auto it = by_domain_.find(d);
    if (it == by_domain_.end()) continue;
    it->second.erase(doc->id);
    if (it->second.empty()) by_domain_.erase(it);
  }
  std::sort(domains.begin(), domains.end());
  domains.erase(std::unique(domains.begin(), domains.end()), domains.end());
  doc->domains = std::move(domains);
  for (const auto& d : doc->domains) by_domain_[d].insert(doc->id);
}

const std::set<std::string>& CorpusStore::by_domain(const std::string& tag) const {
  auto it = by_domain_.find(tag);
  return it == by_domain_.end() ? kNoDocs : it->second;
}

bool CorpusStore::check_consistency() const {
  std::map<std::string, std::set<std::string>> expected;
  for (const auto& [id, doc] : documents_) {
    for (const auto& d : doc.domains) expected[d].insert(id);
  }
  return expected == by_domain_;
}

CorpusStore ingest_corpus_text(std::string_view jsonl) {
  ParsedCorpus parsed = parse_corpus(jsonl);
  if (!parsed.errors.empty()) {
    const auto& first = parsed.errors.front();
    if (!parsed.duplicate_ids.empty() && first.message.rfind("duplicate", 0) == 0) {
      throw Error(Errc::DuplicateId, "line " + std::to_string(first.line) + ": " + first.message, first.line);
    }
    throw Error(Errc::MalformedLine, "line " + std::to_string(first.line) + ": " + first.message, first.line);
  }
  CorpusStore store;
  for (auto& doc : parsed.documents) store.add(std::move(doc));
  return store;
}

CorpusStore ingest_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open corpus " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return ingest_corpus_text(text);
}

IndexStats index_corpus(CorpusStore& store, const Preprocessor& preprocessor, const DomainModel& domain_model,
                        const EmbeddingStore& embeddings, const ModelSet& models) {
  std::vector<Document*> docs;
  docs.reserve(store.size());
  for (auto& [id, doc] : store.documents_mutable()) docs.push_back(&doc);

  const std::uint64_t fp = preprocessor.fingerprint();
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Document& doc = *docs[static_cast<std::size_t>(i)];
    if (doc.tokens_fingerprint != fp || doc.tokens.source_doc_id != doc.id) {
      doc.tokens = preprocessor.run(doc.title.empty() ? doc.text : doc.title + ". " + doc.text, doc.id);
      doc.tokens_fingerprint = fp;
    }
  }

  // Domain assignment: labels win when every label has a model.
  std::vector<TokenStream> streams;
  std::vector<DomainAssignment> assignments;
  std::vector<Document*> targets;
  IndexStats stats;
  for (Document* doc : docs) {
    DomainAssignment a{doc->id, {}};
    if (doc->labeled) {
      for (const auto& d : doc->domains) {
        if (models.contains(d)) a.domains.push_back({d, 1.0});
      }
    }
    if (a.domains.empty()) {
      try {
        a = assign_domains(doc->tokens, domain_model, embeddings);
      } catch (const Error& e) {
        if (e.code() != Errc::NoEmbeddableTokens) throw;
      }
    }
    if (a.domains.empty()) {
      doc->bag = {};
      doc->indexed = true;
      doc->unindexable = true;
      if (!doc->labeled) store.set_domains(doc->id, {});
      ++stats.unindexable;
      continue;
    }
    streams.push_back(doc->tokens);
    assignments.push_back(std::move(a));
    targets.push_back(doc);
  }

  auto bags = kernels::infer_bags(streams, assignments, models);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    Document* doc = targets[i];
    std::vector<std::string> tags;
    for (const auto& d : assignments[i].domains) tags.push_back(d.domain);
    if (!doc->labeled) store.set_domains(doc->id, std::move(tags));
    doc->indexed = true;
    if (bags[i]) {
      doc->bag = std::move(*bags[i]);
      doc->unindexable = false;
      ++stats.indexed;
    } else {
      doc->bag = {};
      doc->unindexable = true;
      ++stats.unindexable;
    }
  }
  return stats;
}

void save_store(const CorpusStore& store, const std::filesystem::path& dir, std::uint64_t preprocess_fingerprint) {
  std::filesystem::create_directories(dir);
  std::ofstream corpus(dir / "corpus.jsonl", std::ios::trunc);
  if (!corpus) throw Error(Errc::IoFailure, "cannot write " + (dir / "corpus.jsonl").string());
  nlohmann::json index;
  index["format"] = "topicrec-index";
  index["version"] = kIndexFormatVersion;
  index["preprocess_fingerprint"] = hex64(preprocess_fingerprint);
  index["documents"] = nlohmann::json::array();
  for (const auto& [id, doc] : store.documents()) {
    nlohmann::json line{{"id", doc.id}, {"title", doc.title}, {"text", doc.text}};
    if (doc.labeled) line["domains"] = doc.domains;
    corpus << line.dump() << '\n';
    index["documents"].push_back({{"id", doc.id},
                                  {"domains", doc.domains},
                                  {"tokens", doc.tokens.tokens},
                                  {"bag", to_json(doc.bag)},
                                  {"indexed", doc.indexed},
                                  {"unindexable", doc.unindexable}});
  }
  if (!corpus) throw Error(Errc::IoFailure, "write failed for corpus.jsonl");
  std::ofstream sidecar(dir / "index.json", std::ios::trunc);
  if (!sidecar) throw Error(Errc::IoFailure, "cannot write " + (dir / "index.json").string());
  sidecar << index.dump(1) << '\n';
  if (!sidecar) throw Error(Errc::IoFailure, "write failed for index.json");
}

CorpusStore load_store(const std::filesystem::path& dir) {
  CorpusStore store = ingest_corpus(dir / "corpus.jsonl");
  std::ifstream in(dir / "index.json");
  if (!in) return store;
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::IoFailure, std::string("cannot parse index.json: ") + e.what());
  }
  if (index.value("format", "") != "topicrec-index" || index.value("version", 0) != kIndexFormatVersion) {
    throw Error(Errc::VersionMismatch, "unsupported index sidecar");
  }
  const std::uint64_t fp = std::stoull(index.at("preprocess_fingerprint").get<std::string>(), nullptr, 16);
  for (const auto& e : index.at("documents")) {
    const auto id = e.at("id").get<std::string>();
    Document* doc = store.find_mutable(id);
    if (doc == nullptr) throw Error(Errc::UnknownDoc, "index.json references unknown document " + id);
    if (!doc->labeled) store.set_domains(id, e.at("domains").get<std::vector<std::string>>());
    doc->tokens = TokenStream{e.at("tokens").get<std::vector<std::string>>(), id};
    doc->tokens_fingerprint = fp;
    doc->bag = bag_from_json(e.at("bag"));
    doc->indexed = e.at("indexed").get<bool>();
    doc->unindexable = e.at("unindexable").get<bool>();
  }
  return store;
}

}  // namespace topicrec
