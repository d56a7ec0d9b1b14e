#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "topicrec/bag_of_topics.hpp"
#include "topicrec/domain_selector.hpp"
#include "topicrec/embeddings.hpp"
#include "topicrec/inferencer.hpp"
#include "topicrec/preprocess.hpp"
#include "topicrec/profile.hpp"
#include "topicrec/ranker.hpp"
#include "topicrec/store.hpp"
#include "topicrec/topic_model.hpp"

namespace topicrec {

struct EngineConfig {
  PreprocessConfig preprocess;
  ProfileConfig profile;
  std::size_t default_k = kDefaultResultCount;
  // Score every indexed paper instead of only those sharing a domain with the query.
  bool exhaustive_candidates = false;
};

struct TrainOptions {
  LdaConfig lda;
  std::size_t top_m = kDefaultTopWords;
  double threshold = kDefaultDomainThreshold;
};

struct DomainTrainingReport {
  std::string domain;
  std::uint32_t topics = 0;
  std::size_t vocabulary_size = 0;
  std::size_t documents = 0;
  std::uint32_t iterations = 0;
  std::uint64_t seed = 0;
};

struct TrainingReport {
  std::vector<DomainTrainingReport> domains;
  IndexStats index;
};

struct QueryOutcome {
  std::string query_id;
  BagOfTopics original;  // q
  BagOfTopics applied;   // q' = q + u
  std::vector<RankedResult> results;
};

struct FeedbackOutcome {
  bool profile_updated = false;
  std::size_t preferred = 0;
};

// The full recommender: preprocessing, domain selection, per-domain topic
// models, the indexed corpus and per-user preference profiles.
//
// Thread-safe. Training takes the model lock exclusively; queries and
// feedback share it. Mutations of one user's profile serialize on that
// user's lock.
class Engine {
 public:
  explicit Engine(EngineConfig config = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void set_embeddings(EmbeddingStore embeddings);
  bool has_embeddings() const;

  // Adds documents (atomically: on DuplicateId nothing is added). New
  // documents are indexed right away when models exist.
  std::size_t add_documents(std::vector<Document> docs);
  std::size_t document_count() const;
  std::optional<Document> document(const std::string& id) const;

  // Trains the domain selector and one topic model per labeled domain, then
  // indexes the corpus. `extra_labeled` documents are used for training only.
  // Throws Conflict while another training run is in progress.
  TrainingReport train(const TrainOptions& options, const std::vector<Document>& extra_labeled = {});
  bool trained() const;
  bool training_in_progress() const { return training_.load(); }

  // Raw bag of topics of a text (no profile involved). Throws InvalidArgument
  // for text without usable words, NotTrained.
  BagOfTopics represent(const std::string& text) const;

  // Ranks a bag against the indexed corpus; only the positive part of the bag is used.
  std::vector<RankedResult> rank_bag(const BagOfTopics& bag, std::size_t k) const;

  // preprocess -> domains -> bag -> q' = q + u -> rank. Creates the user on first use.
  QueryOutcome query(const std::string& user_id, const std::string& text, std::size_t k);

  // Throws NotFound (unknown user/query), Conflict (feedback already given),
  // UnknownDoc.
  FeedbackOutcome feedback(const std::string& user_id, const std::string& query_id,
                           const std::vector<std::string>& preferred_doc_ids);

  std::optional<UserProfile> profile(const std::string& user_id) const;
  // Replaces (or creates) a user's profile, dropping their query history.
  void put_profile(UserProfile profile);
  void reset_user(const std::string& user_id);

  const EngineConfig& config() const { return config_; }
  ProfileConfig profile_config() const;
  void set_profile_config(const ProfileConfig& cfg);

  // Data directory layout: corpus.jsonl, index.json, domains.json,
  // embeddings.txt, models/<TAG>.lda, profiles/<hex(user)>.json.
  void save(const std::filesystem::path& dir) const;
  static std::unique_ptr<Engine> load(const std::filesystem::path& dir, EngineConfig config = {});
  // Profiles are written to <dir>/profiles after every change when set.
  void attach_profile_dir(std::filesystem::path dir);

 private:
  struct QueryRecord {
    BagOfTopics original;
    BagOfTopics applied;
    bool feedback_given = false;
  };
  struct UserSession {
    std::mutex mutex;
    UserProfile profile;
    std::map<std::string, QueryRecord> queries;
  };

  std::shared_ptr<UserSession> session(const std::string& user_id, bool create) const;
  void persist(const UserProfile& profile) const;
  std::vector<Candidate> candidates_for(const BagOfTopics& query) const;

  EngineConfig config_;
  Preprocessor preprocessor_;

  std::atomic<bool> training_{false};
  mutable std::shared_mutex model_mutex_;
  std::optional<EmbeddingStore> embeddings_;
  DomainModel domain_model_;
  ModelSet models_;
  CorpusStore corpus_;

  mutable std::mutex users_mutex_;
  mutable std::map<std::string, std::shared_ptr<UserSession>> users_;
  ProfileConfig profile_config_;
  std::optional<std::filesystem::path> profile_dir_;
};

std::string query_id_for(const std::string& user_id, std::uint64_t counter);

}  // namespace topicrec
