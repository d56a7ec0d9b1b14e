#include "topicrec/engine.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include "topicrec/error.hpp"
#include "topicrec/hash.hpp"

namespace topicrec {

namespace {

std::string hex_encode(std::string_view s) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(s.size() * 2);
  for (unsigned char c : s) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 15]);
  }
  return out;
}

// Clears a flag on scope exit.
class FlagReset {
 public:
  explicit FlagReset(std::atomic<bool>& flag) : flag_(flag) {}
  ~FlagReset() { flag_.store(false); }
  FlagReset(const FlagReset&) = delete;
  FlagReset& operator=(const FlagReset&) = delete;

 private:
  std::atomic<bool>& flag_;
};

}  // namespace

std::string query_id_for(const std::string& user_id, std::uint64_t counter) {
  const auto h = Fnv1a().update(user_id).update(std::string_view("\0", 1)).update_u64(counter).digest();
  std::ostringstream os;
  os << 'q' << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

Engine::Engine(EngineConfig config)
    : config_(std::move(config)), preprocessor_(config_.preprocess), profile_config_(config_.profile) {}

Engine::~Engine() = default;

void Engine::set_embeddings(EmbeddingStore embeddings) {
  std::unique_lock lock(model_mutex_);
  embeddings_ = std::move(embeddings);
}

bool Engine::has_embeddings() const {
  std::shared_lock lock(model_mutex_);
  return embeddings_.has_value();
}

std::size_t Engine::add_documents(std::vector<Document> docs) {
  std::unique_lock lock(model_mutex_);
  std::set<std::string, std::less<>> incoming;
  for (const auto& d : docs) {
    if (corpus_.contains(d.id) || !incoming.insert(d.id).second) {
      throw Error(Errc::DuplicateId, "duplicate document id \"" + d.id + "\"");
    }
  }
  if (models_.empty()) {
    for (auto& d : docs) corpus_.add(std::move(d));
    return incoming.size();
  }
  // Index the new documents in a scratch store, then move them in.
  CorpusStore fresh;
  for (auto& d : docs) fresh.add(std::move(d));
  index_corpus(fresh, preprocessor_, domain_model_, *embeddings_, models_);
  for (auto& [id, doc] : fresh.documents_mutable()) corpus_.add(std::move(doc));
  return incoming.size();
}

std::size_t Engine::document_count() const {
  std::shared_lock lock(model_mutex_);
  return corpus_.size();
}

std::optional<Document> Engine::document(const std::string& id) const {
  std::shared_lock lock(model_mutex_);
  const Document* d = corpus_.find(id);
  if (d == nullptr) return std::nullopt;
  return *d;
}

TrainingReport Engine::train(const TrainOptions& options, const std::vector<Document>& extra_labeled) {
  bool expected = false;
  if (!training_.compare_exchange_strong(expected, true)) {
    throw Error(Errc::Conflict, "training is already in progress");
  }
  FlagReset reset(training_);
  options.lda.validate();

  std::unique_lock lock(model_mutex_);
  if (!embeddings_) throw Error(Errc::InvalidConfig, "no word embeddings loaded");
  if (corpus_.size() == 0 && extra_labeled.empty()) throw Error(Errc::EmptyCorpus, "corpus is empty");

  // Labeled training material: corpus documents carrying domains plus extras.
  std::vector<LabeledTokens> labeled;
  std::map<std::string, std::vector<TokenStream>> by_domain;
  auto add_labeled = [&](const Document& doc) {
    TokenStream tokens = preprocessor_.run(doc.title.empty() ? doc.text : doc.title + ". " + doc.text, doc.id);
    for (const auto& d : doc.domains) {
      labeled.push_back({tokens, d});
      by_domain[d].push_back(tokens);
    }
  };
  for (const auto& [id, doc] : corpus_.documents()) {
    if (doc.labeled) add_labeled(doc);
  }
  for (const auto& doc : extra_labeled) {
    if (!doc.domains.empty()) add_labeled(doc);
  }
  if (labeled.empty()) throw Error(Errc::EmptyCorpus, "no labeled documents to train on");

  DomainModel domain_model = build_domain_vectors(labeled, *embeddings_, options.top_m, options.threshold);

  std::vector<std::string> tags;
  for (const auto& [tag, docs] : by_domain) tags.push_back(tag);
  std::vector<std::optional<LdaResult>> results(tags.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(tags.size());
  // Domains are independent; each sampler stays sequential and seeded.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      results[idx] = train_lda(by_domain.at(tags[idx]), options.lda, tags[idx]);
    } catch (...) {
#pragma omp critical(topicrec_train_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  TrainingReport report;
  ModelSet models;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    TopicModel& m = results[i]->model;
    report.domains.push_back({tags[i], static_cast<std::uint32_t>(m.topics()), m.vocabulary().size(),
                              by_domain.at(tags[i]).size(), options.lda.iterations, options.lda.seed});
    InvertedIndex index = build_inverted_index(m);
    models.emplace(tags[i], DomainTopicModel{std::move(m), std::move(index)});
  }

  domain_model_ = std::move(domain_model);
  models_ = std::move(models);
  report.index = index_corpus(corpus_, preprocessor_, domain_model_, *embeddings_, models_);
  return report;
}

bool Engine::trained() const {
  std::shared_lock lock(model_mutex_);
  return !models_.empty();
}

BagOfTopics Engine::represent(const std::string& text) const {
  std::shared_lock lock(model_mutex_);
  if (models_.empty() || !embeddings_) throw Error(Errc::NotTrained, "models not trained");
  TokenStream tokens = preprocessor_.run(text, "query");
  if (tokens.tokens.empty()) throw Error(Errc::InvalidArgument, "query has no content words");
  DomainAssignment a = assign_domains(tokens, domain_model_, *embeddings_);
  return infer_bag_of_topics(tokens, a, models_);
}

std::vector<Candidate> Engine::candidates_for(const BagOfTopics& query) const {
  std::vector<Candidate> out;
  auto push = [&](const Document& doc) {
    if (doc.indexed && !doc.unindexable) out.push_back({doc.id, &doc.bag});
  };
  if (config_.exhaustive_candidates) {
    for (const auto& [id, doc] : corpus_.documents()) push(doc);
    return out;
  }
  std::set<std::string> domains;
  for (const auto& [topic, w] : query.entries()) domains.insert(topic.domain);
  std::set<std::string> ids;
  for (const auto& d : domains) {
    const auto& members = corpus_.by_domain(d);
    ids.insert(members.begin(), members.end());
  }
  for (const auto& id : ids) push(*corpus_.find(id));
  return out;
}

std::vector<RankedResult> Engine::rank_bag(const BagOfTopics& bag, std::size_t k) const {
  std::shared_lock lock(model_mutex_);
  const BagOfTopics positive = bag.positive_part();
  if (positive.empty()) return {};
  const auto candidates = candidates_for(positive);
  return rank(positive, candidates, k == 0 ? config_.default_k : k);
}

std::shared_ptr<Engine::UserSession> Engine::session(const std::string& user_id, bool create) const {
  std::lock_guard lock(users_mutex_);
  auto it = users_.find(user_id);
  if (it != users_.end()) return it->second;
  if (!create) return nullptr;
  auto s = std::make_shared<UserSession>();
  s->profile.user_id = user_id;
  users_.emplace(user_id, s);
  return s;
}

QueryOutcome Engine::query(const std::string& user_id, const std::string& text, std::size_t k) {
  BagOfTopics q = represent(text);
  auto s = session(user_id, true);
  QueryOutcome out;
  {
    std::lock_guard lock(s->mutex);
    ModifiedQuery mq = modify_query(q, s->profile);
    out.query_id = query_id_for(user_id, s->profile.queries_total);
    out.original = std::move(mq.original);
    out.applied = std::move(mq.modified);
    s->queries[out.query_id] = QueryRecord{out.original, out.applied, false};
    persist(s->profile);
  }
  out.results = rank_bag(out.applied, k);
  return out;
}

FeedbackOutcome Engine::feedback(const std::string& user_id, const std::string& query_id,
                                 const std::vector<std::string>& preferred_doc_ids) {
  auto s = session(user_id, false);
  if (!s) throw Error(Errc::NotFound, "unknown user \"" + user_id + "\"");

  std::vector<BagOfTopics> bags;
  {
    std::shared_lock lock(model_mutex_);
    for (const auto& id : preferred_doc_ids) {
      const Document* doc = corpus_.find(id);
      if (doc == nullptr) throw Error(Errc::UnknownDoc, "unknown document \"" + id + "\"");
      bags.push_back(doc->bag);
    }
  }

  std::lock_guard lock(s->mutex);
  auto it = s->queries.find(query_id);
  if (it == s->queries.end()) throw Error(Errc::NotFound, "unknown query id \"" + query_id + "\"");
  if (it->second.feedback_given) throw Error(Errc::Conflict, "feedback for \"" + query_id + "\" was already recorded");

  record_feedback(s->profile, it->second.original, std::move(bags));
  it->second.feedback_given = true;
  FeedbackOutcome out;
  out.preferred = preferred_doc_ids.size();
  out.profile_updated = update_profile(s->profile, profile_config());
  persist(s->profile);
  return out;
}

std::optional<UserProfile> Engine::profile(const std::string& user_id) const {
  auto s = session(user_id, false);
  if (!s) return std::nullopt;
  std::lock_guard lock(s->mutex);
  return s->profile;
}

void Engine::put_profile(UserProfile profile) {
  auto s = std::make_shared<UserSession>();
  s->profile = std::move(profile);
  persist(s->profile);
  std::lock_guard lock(users_mutex_);
  users_[s->profile.user_id] = std::move(s);
}

void Engine::reset_user(const std::string& user_id) {
  UserProfile fresh;
  fresh.user_id = user_id;
  put_profile(std::move(fresh));
}

ProfileConfig Engine::profile_config() const {
  std::lock_guard lock(users_mutex_);
  return profile_config_;
}

void Engine::set_profile_config(const ProfileConfig& cfg) {
  std::lock_guard lock(users_mutex_);
  profile_config_ = cfg;
}

void Engine::attach_profile_dir(std::filesystem::path dir) {
  std::filesystem::create_directories(dir);
  std::lock_guard lock(users_mutex_);
  profile_dir_ = std::move(dir);
}

void Engine::persist(const UserProfile& profile) const {
  std::optional<std::filesystem::path> dir;
  {
    std::lock_guard lock(users_mutex_);
    dir = profile_dir_;
  }
  if (dir) persist_profile(profile, *dir / (hex_encode(profile.user_id) + ".json"));
}

void Engine::save(const std::filesystem::path& dir) const {
  std::shared_lock lock(model_mutex_);
  std::filesystem::create_directories(dir);
  save_store(corpus_, dir, preprocessor_.fingerprint());
  if (embeddings_) embeddings_->save(dir / "embeddings.txt");
  if (!models_.empty()) {
    domain_model_.save(dir / "domains.json");
    std::filesystem::create_directories(dir / "models");
    for (const auto& [tag, m] : models_) save_model(m.model, dir / "models" / (tag + ".lda"));
  }
  std::lock_guard users_lock(users_mutex_);
  if (!users_.empty()) std::filesystem::create_directories(dir / "profiles");
  for (const auto& [id, s] : users_) {
    std::lock_guard user_lock(s->mutex);
    persist_profile(s->profile, dir / "profiles" / (hex_encode(id) + ".json"));
  }
}

std::unique_ptr<Engine> Engine::load(const std::filesystem::path& dir, EngineConfig config) {
  auto engine = std::make_unique<Engine>(std::move(config));
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) return engine;
  if (fs::exists(dir / "embeddings.txt")) engine->embeddings_ = EmbeddingStore::load(dir / "embeddings.txt");
  if (fs::exists(dir / "corpus.jsonl")) engine->corpus_ = load_store(dir);
  if (fs::exists(dir / "domains.json") && fs::is_directory(dir / "models")) {
    engine->domain_model_ = DomainModel::load(dir / "domains.json");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir / "models")) {
      if (entry.path().extension() == ".lda") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      LoadedModel m = load_model(f);
      std::string tag = m.model.domain();
      engine->models_.emplace(std::move(tag), DomainTopicModel{std::move(m.model), std::move(m.index)});
    }
    // Re-index only what the sidecar left stale (e.g. preprocess config changed).
    bool stale = false;
    for (const auto& [id, doc] : engine->corpus_.documents()) {
      stale = stale || !doc.indexed || doc.tokens_fingerprint != engine->preprocessor_.fingerprint();
    }
    if (stale && engine->embeddings_) {
      index_corpus(engine->corpus_, engine->preprocessor_, engine->domain_model_, *engine->embeddings_,
                   engine->models_);
    }
  }
  if (fs::is_directory(dir / "profiles")) {
    for (const auto& entry : fs::directory_iterator(dir / "profiles")) {
      if (entry.path().extension() != ".json") continue;
      UserProfile p = load_profile(entry.path());
      auto s = std::make_shared<UserSession>();
      s->profile = std::move(p);
      engine->users_[s->profile.user_id] = std::move(s);
    }
  }
  return engine;
}

}  // namespace topicrec
