#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "topicrec/rng.hpp"

namespace topicrec::testing {

std::vector<TokenStream> two_theme_corpus(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenStream> corpus;
  for (int theme = 0; theme < 2; ++theme) {
    const auto& words = theme == 0 ? kFruitWords : kHardwareWords;
    for (int d = 0; d < 20; ++d) {
      TokenStream doc{{}, (theme == 0 ? "fruit-" : "hw-") + std::to_string(d)};
      for (int i = 0; i < 8; ++i) doc.tokens.push_back(words[rng.below(3)]);
      corpus.push_back(std::move(doc));
    }
  }
  return corpus;
}

LdaConfig toy_lda_config(std::uint64_t seed) {
  LdaConfig c;
  c.topics = 2;
  c.iterations = 200;
  c.alpha = 0.1;
  c.beta = 0.01;
  c.seed = seed;
  return c;
}

double toy_purity(const InvertedIndex& index, const std::vector<TokenStream>& corpus) {
  std::map<std::uint32_t, std::map<int, std::size_t>> counts;
  std::size_t total = 0;
  for (const auto& doc : corpus) {
    for (const auto& t : doc.tokens) {
      const IndexEntry* e = index.find(t);
      if (e == nullptr) continue;
      const bool fruit = std::find(kFruitWords.begin(), kFruitWords.end(), t) != kFruitWords.end();
      ++counts[e->topic][fruit ? 0 : 1];
      ++total;
    }
  }
  std::size_t majority = 0;
  for (const auto& [topic, by_theme] : counts) {
    std::size_t best = 0;
    for (const auto& [theme, c] : by_theme) best = std::max(best, c);
    majority += best;
  }
  return total == 0 ? 0.0 : static_cast<double>(majority) / static_cast<double>(total);
}

EmbeddingStore toy_embeddings() {
  const std::vector<std::pair<std::string, Vector>> rows = {
      {"apple", {1.0, 0.05, 0.0}}, {"banana", {0.95, 0.0, 0.1}}, {"fruit", {1.0, 0.1, 0.05}},
      {"cpu", {0.0, 1.0, 0.05}},   {"gpu", {0.05, 0.95, 0.0}},   {"cache", {0.1, 1.0, 0.1}},
  };
  // Both the surface form and the preprocessed form resolve to the same vector.
  const Preprocessor pre;
  EmbeddingStore store(3);
  for (const auto& [word, vec] : rows) {
    store.insert(word, vec);
    const auto stem = pre.run(word).tokens.at(0);
    if (stem != word) store.insert(stem, vec);
  }
  return store;
}

std::vector<Document> toy_documents() {
  std::vector<Document> docs;
  for (const auto& stream : two_theme_corpus()) {
    Document doc;
    doc.id = stream.source_doc_id;
    for (const auto& t : stream.tokens) doc.text += (doc.text.empty() ? "" : " ") + t;
    doc.domains = {doc.id.rfind("fruit-", 0) == 0 ? "FRU" : "HW"};
    doc.labeled = true;
    docs.push_back(std::move(doc));
  }
  return docs;
}

namespace {

// Row t puts 0.9 on the word mapped to it; unmapped rows are uniform.
TopicModel peaked_model(const std::string& tag, std::size_t topics, const std::vector<std::string>& words,
                        const std::map<std::size_t, std::size_t>& word_topic) {
  const std::size_t V = words.size();
  std::vector<double> phi(topics * V, 1.0 / static_cast<double>(V));
  for (const auto& [w, t] : word_topic) {
    for (std::size_t j = 0; j < V; ++j) phi[t * V + j] = j == w ? 0.9 : 0.1 / static_cast<double>(V - 1);
  }
  LdaConfig cfg;
  cfg.topics = static_cast<std::uint32_t>(topics);
  return TopicModel(tag, Vocabulary(words), std::move(phi),
                    std::vector<double>(topics, 1.0 / static_cast<double>(topics)), cfg);
}

}  // namespace

void write_worked_example(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::remove_all(dir);
  fs::create_directories(dir / "models");

  EmbeddingStore emb(3);
  for (const char* w : {"algebra", "manifold"}) emb.insert(w, {1, 0, 0});
  for (const char* w : {"compiler", "kernel"}) emb.insert(w, {0, 1, 0});
  for (const char* w : {"poetry", "prose"}) emb.insert(w, {0, 0, 1});
  emb.save(dir / "embeddings.txt");

  DomainModel domains;
  domains.threshold = 0.15;
  domains.domains = {{"MAT", {1, 0, 0}}, {"CS", {0, 1, 0}}, {"HUM", {0, 0, 1}}};
  domains.save(dir / "domains.json");

  save_model(peaked_model("MAT", 10, {"algebra", "manifold"}, {{0, 1}, {1, 9}}), dir / "models" / "MAT.lda");
  save_model(peaked_model("CS", 7, {"compiler", "kernel"}, {{0, 3}, {1, 6}}), dir / "models" / "CS.lda");
  save_model(peaked_model("HUM", 5, {"poetry", "prose"}, {{0, 4}}), dir / "models" / "HUM.lda");

  std::ofstream corpus(dir / "corpus.jsonl");
  corpus << R"({"id":"r1","title":"","text":"algebra algebra algebra algebra compiler kernel kernel kernel"})" << '\n'
         << R"({"id":"r2","title":"","text":"manifold manifold manifold manifold manifold compiler poetry"})" << '\n';
}

std::string worked_example_query() {
  return "algebra algebra algebra algebra algebra compiler compiler compiler compiler compiler compiler poetry poetry";
}

namespace {

const std::vector<std::vector<std::string>> kThemes = {
    {"photon", "laser", "lens", "prism", "optic", "refraction"},
    {"galaxy", "nebula", "quasar", "pulsar", "comet", "meteor"},
    {"enzyme", "protein", "genome", "ribosome", "peptide", "lipid"},
    {"neuron", "synapse", "cortex", "axon", "dendrite", "glia"},
    {"tariff", "inflation", "monetary", "fiscal", "bond", "equity"},
    {"auction", "bidder", "pricing", "market", "tender", "bargain"},
    {"basalt", "granite", "magma", "tectonic", "sediment", "fossil"},
    {"cyclone", "monsoon", "humidity", "drizzle", "thunder", "blizzard"},
    {"melody", "harmony", "rhythm", "chord", "tempo", "sonata"},
    {"recipe", "oven", "skillet", "simmer", "saute", "dough"},
    {"statute", "verdict", "plaintiff", "tribunal", "appeal", "lawsuit"},
    {"striker", "goalie", "referee", "penalty", "dribble", "stadium"},
    {"catalyst", "oxidation", "polymer", "solvent", "reagent", "titration"},
    {"router", "packet", "latency", "bandwidth", "protocol", "firewall"},
    {"pollen", "petal", "stamen", "chlorophyll", "seedling", "fern"},
};
const std::vector<std::string> kThemeDomain = {"OPT", "AST", "BIO", "NEU", "MAC", "MKT", "GEO", "MET",
                                               "MUS", "COOK", "LAW", "SPT", "CHEM", "NET", "BOT"};

// Theme i is queried by one user and planted for another.
constexpr int kPlantOffset = 5;

// Token counts (query theme, planted theme) of each desired paper.
const std::vector<std::pair<int, int>> kMixes = {{7, 3}, {6, 4}, {5, 5}, {4, 6}, {3, 7}, {2, 8}};

constexpr int kPurePerTheme = 4;
constexpr int kPureLength = 12;

std::string sample_words(const std::vector<std::string>& words, int n, Rng& rng) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (!out.empty()) out += ' ';
    out += words[rng.below(static_cast<std::uint32_t>(words.size()))];
  }
  return out;
}

}  // namespace

PlantedWorld planted_world() {
  PlantedWorld world;
  world.theme_words = kThemes;
  world.theme_domain = kThemeDomain;

  // Embeddings keyed by the preprocessed form of each word: theme i lies
  // along axis i with a small word-specific offset.
  const Preprocessor pre;
  for (std::size_t i = 0; i < kThemes.size(); ++i) {
    for (std::size_t j = 0; j < kThemes[i].size(); ++j) {
      Vector v(kThemes.size(), 0.0);
      v[i] = 1.0;
      v[(i + 1 + j) % kThemes.size()] += 0.03 * static_cast<double>(j % 3);
      world.embeddings.insert(pre.run(kThemes[i][j]).tokens.at(0), v);
    }
  }

  Rng rng(2024);
  for (std::size_t t = 0; t < kThemes.size(); ++t) {
    for (int d = 0; d < kPurePerTheme; ++d) {
      Document doc;
      doc.id = "pure-" + std::to_string(t) + "-" + std::to_string(d);
      doc.title = "Notes on " + kThemes[t][static_cast<std::size_t>(d) % kThemes[t].size()];
      doc.text = sample_words(kThemes[t], kPureLength, rng) + ".";
      doc.domains = {kThemeDomain[t]};
      doc.labeled = true;
      world.documents.push_back(std::move(doc));
    }
  }

  world.spec.iterations = 10;
  world.spec.k = 10;
  for (std::size_t u = 0; u < kThemes.size(); ++u) {
    const int a = static_cast<int>(u);
    const int p = static_cast<int>((u + kPlantOffset) % kThemes.size());
    EvalUser user;
    user.id = "user" + std::to_string(u + 1);
    user.query = kThemes[static_cast<std::size_t>(a)][0] + " " + kThemes[static_cast<std::size_t>(a)][1];
    for (std::size_t m = 0; m < kMixes.size(); ++m) {
      Document doc;
      doc.id = "mix-" + std::to_string(a) + "-" + std::to_string(p) + "-" + std::to_string(m);
      doc.text = sample_words(kThemes[static_cast<std::size_t>(a)], kMixes[m].first, rng) + " " +
                 sample_words(kThemes[static_cast<std::size_t>(p)], kMixes[m].second, rng) + ".";
      user.desired.insert(doc.id);
      world.documents.push_back(std::move(doc));
    }
    world.spec.users.push_back(std::move(user));
  }
  return world;
}

void write_planted_files(const PlantedWorld& world, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream corpus(dir / "corpus.jsonl");
  for (const auto& d : world.documents) {
    nlohmann::json j{{"id", d.id}, {"title", d.title}, {"text", d.text}};
    if (d.labeled) j["domains"] = d.domains;
    corpus << j.dump() << '\n';
  }
  world.embeddings.save(dir / "embeddings.txt");
  nlohmann::json spec{{"iterations", world.spec.iterations}, {"k", world.spec.k}, {"users", nlohmann::json::array()}};
  for (const auto& u : world.spec.users) {
    spec["users"].push_back({{"id", u.id}, {"query", u.query}, {"desired", u.desired}});
  }
  std::ofstream(dir / "spec.json") << spec.dump(1) << '\n';
}

TrainOptions planted_train_options(std::uint64_t seed) {
  TrainOptions opts;
  opts.lda.topics = 2;
  opts.lda.iterations = 300;
  opts.lda.alpha = 0.1;
  opts.lda.beta = 0.01;
  opts.lda.seed = seed;
  return opts;
}

}  // namespace topicrec::testing
