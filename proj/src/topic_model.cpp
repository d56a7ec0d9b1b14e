#include "topicrec/topic_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "topicrec/error.hpp"
#include "topicrec/hash.hpp"
#include "topicrec/kernels.hpp"
#include "topicrec/rng.hpp"

namespace topicrec {

void LdaConfig::validate() const {
  if (topics < 2) throw Error(Errc::InvalidConfig, "number of topics must be >= 2");
  if (!(effective_alpha() > 0.0)) throw Error(Errc::InvalidConfig, "alpha must be > 0");
  if (!(beta > 0.0)) throw Error(Errc::InvalidConfig, "beta must be > 0");
  if (iterations < 1) throw Error(Errc::InvalidConfig, "iterations must be >= 1");
  if (min_doc_freq < 1) throw Error(Errc::InvalidConfig, "min_doc_freq must be >= 1");
  if (max_vocab < 2) throw Error(Errc::InvalidConfig, "max_vocab must be >= 2");
}

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  ids_.reserve(words_.size());
  for (std::uint32_t i = 0; i < words_.size(); ++i) {
    if (!ids_.emplace(words_[i], i).second) {
      throw Error(Errc::InvalidArgument, "duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

std::optional<std::uint32_t> Vocabulary::id_of(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TopicModel::TopicModel(std::string domain_tag, Vocabulary vocab, std::vector<double> phi,
                       std::vector<double> corpus_topic_weights, LdaConfig config)
    : domain_(std::move(domain_tag)),
      topics_(corpus_topic_weights.size()),
      vocab_(std::move(vocab)),
      phi_(std::move(phi)),
      topic_weights_(std::move(corpus_topic_weights)),
      config_(config) {
  if (!is_valid_domain_tag(domain_)) throw Error(Errc::InvalidArgument, "invalid domain tag '" + domain_ + "'");
  if (topics_ == 0 || vocab_.size() == 0) throw Error(Errc::InvalidArgument, "topic model needs K >= 1 and V >= 1");
  if (phi_.size() != topics_ * vocab_.size()) throw Error(Errc::DimensionMismatch, "phi is not K x V");
  for (std::size_t t = 0; t < topics_; ++t) {
    double sum = 0.0;
    for (double p : phi_row(t)) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw Error(Errc::InvalidArgument, "phi entries must be finite and >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(Errc::InvalidArgument, "phi row does not sum to 1");
  }
}

const IndexEntry* InvertedIndex::find(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

namespace {

Vocabulary build_vocabulary(std::span<const TokenStream> corpus, const LdaConfig& config) {
  std::unordered_map<std::string_view, std::pair<std::uint32_t, std::uint64_t>> stats;  // df, cf
  for (const auto& doc : corpus) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : doc.tokens) {
      auto& s = stats[t];
      ++s.second;
      if (seen.insert(t).second) ++s.first;
    }
  }
  const auto min_df = std::min<std::uint32_t>(config.min_doc_freq, static_cast<std::uint32_t>(corpus.size()));
  std::vector<std::pair<std::string_view, std::uint64_t>> kept;
  for (const auto& [word, s] : stats) {
    if (s.first >= min_df) kept.emplace_back(word, s.second);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  if (kept.size() > config.max_vocab) kept.resize(config.max_vocab);
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (const auto& [w, cf] : kept) words.emplace_back(w);
  std::sort(words.begin(), words.end());
  return Vocabulary(std::move(words));
}

}  // namespace

LdaResult train_lda(std::span<const TokenStream> corpus, const LdaConfig& config, const std::string& domain_tag) {
  config.validate();
  if (!is_valid_domain_tag(domain_tag)) throw Error(Errc::InvalidArgument, "invalid domain tag '" + domain_tag + "'");
  if (corpus.empty()) throw Error(Errc::EmptyCorpus, "no training documents for domain " + domain_tag);

  Vocabulary vocab = build_vocabulary(corpus, config);
  const std::size_t V = vocab.size();
  if (V < 2) throw Error(Errc::DegenerateVocabulary, "domain " + domain_tag + " has fewer than 2 vocabulary words");
  const std::size_t K = config.topics;
  const std::size_t D = corpus.size();

  // Canonical form: in-vocabulary ids sorted ascending.
  std::vector<std::vector<std::uint32_t>> docs(D);
  std::size_t total_tokens = 0;
  for (std::size_t d = 0; d < D; ++d) {
    for (const auto& t : corpus[d].tokens) {
      if (auto id = vocab.id_of(t)) docs[d].push_back(*id);
    }
    std::sort(docs[d].begin(), docs[d].end());
    total_tokens += docs[d].size();
  }
  if (total_tokens < K) {
    throw Error(Errc::InvalidArgument, "domain " + domain_tag + " has fewer in-vocabulary tokens than topics");
  }

  const double alpha = config.effective_alpha();
  const double beta = config.beta;
  const double v_beta = static_cast<double>(V) * beta;

  std::vector<std::uint32_t> n_dk(D * K, 0), n_kw(K * V, 0), n_k(K, 0);
  std::vector<std::vector<std::uint32_t>> z(D);
  Rng rng(config.seed);
  for (std::size_t d = 0; d < D; ++d) {
    z[d].resize(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      std::uint32_t k = rng.below(static_cast<std::uint32_t>(K));
      z[d][i] = k;
      ++n_dk[d * K + k];
      ++n_kw[k * V + docs[d][i]];
      ++n_k[k];
    }
  }

  std::vector<double> cumulative(K);
  for (std::uint32_t sweep = 0; sweep < config.iterations; ++sweep) {
    for (std::size_t d = 0; d < D; ++d) {
      std::uint32_t* doc_counts = &n_dk[d * K];
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const std::uint32_t w = docs[d][i];
        std::uint32_t k = z[d][i];
        --doc_counts[k];
        --n_kw[k * V + w];
        --n_k[k];

        double acc = 0.0;
        for (std::size_t t = 0; t < K; ++t) {
          acc += (doc_counts[t] + alpha) * (n_kw[t * V + w] + beta) / (n_k[t] + v_beta);
          cumulative[t] = acc;
        }
        const double u = rng.uniform() * acc;
        k = static_cast<std::uint32_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (k >= K) k = static_cast<std::uint32_t>(K - 1);

        z[d][i] = k;
        ++doc_counts[k];
        ++n_kw[k * V + w];
        ++n_k[k];
      }
    }
  }

  std::vector<double> phi(K * V);
  for (std::size_t k = 0; k < K; ++k) {
    const double denom = n_k[k] + v_beta;
    for (std::size_t w = 0; w < V; ++w) phi[k * V + w] = (n_kw[k * V + w] + beta) / denom;
  }
  std::vector<double> weights(K);
  const double k_alpha = static_cast<double>(K) * alpha;
  for (std::size_t k = 0; k < K; ++k) weights[k] = (n_k[k] + alpha) / (static_cast<double>(total_tokens) + k_alpha);

  LdaResult result{TopicModel(domain_tag, std::move(vocab), std::move(phi), std::move(weights), config), {}, n_kw, n_dk};
  result.doc_topics.reserve(D);
  for (std::size_t d = 0; d < D; ++d) {
    DocTopicVector dv{corpus[d].source_doc_id, std::vector<double>(K)};
    const double denom = static_cast<double>(docs[d].size()) + k_alpha;
    for (std::size_t k = 0; k < K; ++k) dv.theta[k] = (n_dk[d * K + k] + alpha) / denom;
    result.doc_topics.push_back(std::move(dv));
  }
  return result;
}

InvertedIndex build_inverted_index(const TopicModel& model) {
  const auto& words = model.vocabulary().words();
  auto best = kernels::column_argmax(model.phi(), model.topics(), words.size());
  std::unordered_map<std::string, IndexEntry> entries;
  entries.reserve(words.size());
  for (std::size_t w = 0; w < words.size(); ++w) entries.emplace(words[w], best[w]);
  return InvertedIndex(model.domain(), std::move(entries));
}

// ---------------------------------------------------------------------------
// Binary model file (little-endian), see docs/model_format.md.

namespace {

constexpr char kMagic[8] = {'T', 'R', 'L', 'D', 'A', 'M', 'D', 'L'};

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put(bits, 8);
  }
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  std::vector<unsigned char>& buffer() { return buf_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> data) : data_(data) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() {
    std::uint64_t bits = get(8);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(Errc::ChecksumMismatch, "model file is truncated");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const unsigned char> data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> serialize_model(const TopicModel& model) {
  Writer w;
  w.bytes(std::string_view(kMagic, sizeof kMagic));
  w.u32(kModelFormatVersion);
  w.str(model.domain());
  w.u32(static_cast<std::uint32_t>(model.topics()));
  w.u32(static_cast<std::uint32_t>(model.vocabulary().size()));
  const LdaConfig& c = model.config();
  w.f64(c.effective_alpha());
  w.f64(c.beta);
  w.u64(c.seed);
  w.u32(c.iterations);
  w.u32(c.min_doc_freq);
  w.u32(c.max_vocab);
  for (const auto& word : model.vocabulary().words()) w.str(word);
  for (double p : model.phi()) w.f64(p);
  for (double p : model.corpus_topic_weights()) w.f64(p);
  const auto digest = Fnv1a().update(std::span<const unsigned char>(w.buffer())).digest();
  w.u64(digest);
  return std::move(w.buffer());
}

TopicModel deserialize_model(std::span<const unsigned char> bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(bytes.size() < sizeof kMagic ? Errc::ChecksumMismatch : Errc::VersionMismatch,
                "not a topic model file");
  }
  Reader r(bytes.subspan(sizeof kMagic));
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw Error(Errc::VersionMismatch, "model format version " + std::to_string(version) + " is not supported");
  }
  if (bytes.size() < sizeof kMagic + 4 + 8) throw Error(Errc::ChecksumMismatch, "model file is truncated");
  const auto body = bytes.first(bytes.size() - 8);
  Reader tail(bytes.last(8));
  if (Fnv1a().update(body).digest() != tail.u64()) {
    throw Error(Errc::ChecksumMismatch, "model file checksum mismatch (truncated or corrupted)");
  }

  std::string domain = r.str();
  const std::uint32_t K = r.u32();
  const std::uint32_t V = r.u32();
  LdaConfig config;
  config.topics = K;
  config.alpha = r.f64();
  config.beta = r.f64();
  config.seed = r.u64();
  config.iterations = r.u32();
  config.min_doc_freq = r.u32();
  config.max_vocab = r.u32();
  std::vector<std::string> words;
  words.reserve(V);
  for (std::uint32_t i = 0; i < V; ++i) words.push_back(r.str());
  std::vector<double> phi(static_cast<std::size_t>(K) * V);
  for (auto& p : phi) p = r.f64();
  std::vector<double> weights(K);
  for (auto& p : weights) p = r.f64();
  if (r.remaining() != 8) throw Error(Errc::ChecksumMismatch, "model file has trailing or missing bytes");
  return TopicModel(std::move(domain), Vocabulary(std::move(words)), std::move(phi), std::move(weights), config);
}

void save_model(const TopicModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  TopicModel model = deserialize_model(bytes);
  InvertedIndex index = build_inverted_index(model);
  return {std::move(model), std::move(index)};
}

}  // namespace topicrec
