#include "topicrec/domain_selector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "topicrec/error.hpp"
#include "topicrec/topic_id.hpp"

namespace topicrec {

namespace {

constexpr int kDomainFormatVersion = 1;

bool is_zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

bool DomainAssignment::has(const std::string& tag) const {
  return std::any_of(domains.begin(), domains.end(), [&](const DomainScore& d) { return d.domain == tag; });
}

DomainModel build_domain_vectors(std::span<const LabeledTokens> labeled, const EmbeddingStore& store,
                                 std::size_t top_m, double threshold) {
  if (top_m == 0) throw Error(Errc::InvalidConfig, "top_m must be >= 1");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(Errc::InvalidConfig, "domain threshold must be in (0, 1]");

  std::unordered_map<std::string, std::size_t> df;
  std::map<std::string, std::unordered_map<std::string, std::size_t>> tf;
  for (const auto& entry : labeled) {
    if (!is_valid_domain_tag(entry.domain)) {
      throw Error(Errc::InvalidArgument, "invalid domain tag '" + entry.domain + "'");
    }
    auto& counts = tf[entry.domain];
    std::unordered_set<std::string_view> seen;
    for (const auto& t : entry.tokens.tokens) {
      ++counts[t];
      if (seen.insert(t).second) ++df[t];
    }
  }

  const double n_docs = static_cast<double>(labeled.size());
  DomainModel model;
  model.threshold = threshold;
  model.top_m = top_m;
  for (const auto& [tag, counts] : tf) {
    if (counts.empty()) throw Error(Errc::EmptyDomain, "domain " + tag + " has no tokens");
    std::vector<std::pair<std::string, double>> scored;
    for (const auto& [word, count] : counts) {
      if (!store.vector_of(word)) continue;
      double idf = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[word]))) + 1.0;
      scored.emplace_back(word, static_cast<double>(count) * idf);
    }
    if (scored.empty()) throw Error(Errc::UnknownWordAll, "no word of domain " + tag + " has an embedding");
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (scored.size() > top_m) scored.resize(top_m);

    Vector sum(store.dim(), 0.0);
    for (const auto& [word, score] : scored) {
      auto v = *store.vector_of(word);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
    }
    if (is_zero(sum)) throw Error(Errc::EmptyDomain, "representative vector of domain " + tag + " is zero");
    model.domains.emplace(tag, std::move(sum));
  }
  return model;
}

DomainAssignment assign_domains(const TokenStream& doc, const DomainModel& model, const EmbeddingStore& store) {
  if (model.domains.empty()) throw Error(Errc::NotTrained, "domain model has no domains");
  Vector sum(store.dim(), 0.0);
  bool any = false;
  for (const auto& t : doc.tokens) {
    auto v = store.vector_of(t);
    if (!v) continue;
    any = true;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
  }
  if (!any || is_zero(sum)) {
    throw Error(Errc::NoEmbeddableTokens, "document '" + doc.source_doc_id + "' has no embeddable tokens");
  }

  std::vector<DomainScore> all;
  for (const auto& [tag, vec] : model.domains) all.push_back({tag, cosine(sum, vec)});
  // map iteration already gives tag order; stable_sort keeps it for ties
  std::stable_sort(all.begin(), all.end(), [](const DomainScore& a, const DomainScore& b) { return a.score > b.score; });

  DomainAssignment out{doc.source_doc_id, {}};
  for (const auto& d : all) {
    if (d.score >= model.threshold) out.domains.push_back(d);
  }
  if (out.domains.empty()) out.domains.push_back(all.front());
  return out;
}

void DomainModel::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["format"] = "topicrec-domains";
  j["version"] = kDomainFormatVersion;
  j["threshold"] = threshold;
  j["top_m"] = top_m;
  j["domains"] = nlohmann::json::array();
  for (const auto& [tag, vec] : domains) j["domains"].push_back({{"tag", tag}, {"vector", vec}});
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

DomainModel DomainModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::IoFailure, "cannot parse " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "topicrec-domains" || j.value("version", 0) != kDomainFormatVersion) {
    throw Error(Errc::VersionMismatch, "unsupported domain model file " + path.string());
  }
  DomainModel m;
  m.threshold = j.at("threshold").get<double>();
  m.top_m = j.at("top_m").get<std::size_t>();
  for (const auto& d : j.at("domains")) m.domains.emplace(d.at("tag").get<std::string>(), d.at("vector").get<Vector>());
  return m;
}

}  // namespace topicrec
