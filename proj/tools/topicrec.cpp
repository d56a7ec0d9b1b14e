// topicrec: train / serve / query / eval front end.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "topicrec/engine.hpp"
#include "topicrec/error.hpp"
#include "topicrec/eval.hpp"
#include "topicrec/service.hpp"

namespace fs = std::filesystem;
using namespace topicrec;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitNotTrained = 2;

struct TrainArgs {
  std::string corpus;
  std::string labeled;
  std::string embeddings;
  std::string out;
  std::uint32_t topics = 20;
  std::uint32_t iterations = 500;
  std::uint64_t seed = 1;
  double alpha = 0.0;
  double beta = 0.01;
  std::size_t top_m = kDefaultTopWords;
  double threshold = kDefaultDomainThreshold;
};

int run_train(const TrainArgs& args) {
  Engine engine;
  engine.set_embeddings(EmbeddingStore::load(args.embeddings));
  CorpusStore corpus = ingest_corpus(args.corpus);
  std::vector<Document> docs;
  for (auto& [id, doc] : corpus.documents_mutable()) docs.push_back(std::move(doc));
  engine.add_documents(std::move(docs));

  std::vector<Document> extra;
  if (!args.labeled.empty()) {
    CorpusStore labeled = ingest_corpus(args.labeled);
    for (auto& [id, doc] : labeled.documents_mutable()) extra.push_back(std::move(doc));
  }

  TrainOptions opts;
  opts.lda.topics = args.topics;
  opts.lda.iterations = args.iterations;
  opts.lda.seed = args.seed;
  if (args.alpha > 0.0) opts.lda.alpha = args.alpha;
  opts.lda.beta = args.beta;
  opts.top_m = args.top_m;
  opts.threshold = args.threshold;

  TrainingReport report = engine.train(opts, extra);
  engine.save(args.out);
  for (const auto& d : report.domains) {
    std::printf("%-5s K=%u vocab=%zu docs=%zu iterations=%u seed=%llu\n", d.domain.c_str(), d.topics,
                d.vocabulary_size, d.documents, d.iterations, static_cast<unsigned long long>(d.seed));
  }
  std::printf("indexed %zu documents (%zu unindexable) into %s\n", report.index.indexed, report.index.unindexable,
              args.out.c_str());
  return 0;
}

std::unique_ptr<Engine> open_trained(const std::string& data) {
  auto engine = Engine::load(data);
  if (!engine->trained()) throw Error(Errc::NotTrained, "models not trained (run `topicrec train` first)");
  return engine;
}

int run_query(const std::string& data, const std::string& user, const std::string& text, std::size_t k) {
  auto engine = open_trained(data);
  engine->attach_profile_dir(fs::path(data) / "profiles");
  QueryOutcome q = engine->query(user, text, k);
  std::printf("query %s  q' = %s\n", q.query_id.c_str(), q.applied.to_string().c_str());
  int rank = 1;
  for (const auto& r : q.results) {
    std::printf("%3d  %-24s %.6f\n", rank++, r.doc_id.c_str(), r.score);
  }
  return 0;
}

struct ServeArgs {
  std::string listen = "127.0.0.1:8080";
  std::size_t default_k = kDefaultResultCount;
  ProfileConfig profile;
};

int run_serve(const std::string& data, const ServeArgs& args) {
  args.profile.validate();
  if (args.default_k == 0) throw Error(Errc::InvalidArgument, "--k must be >= 1");
  EngineConfig config;
  config.default_k = args.default_k;
  config.profile = args.profile;
  auto engine = Engine::load(data, config);
  engine->attach_profile_dir(fs::path(data) / "profiles");
  const auto colon = args.listen.rfind(':');
  if (colon == std::string::npos) throw Error(Errc::InvalidArgument, "--listen must be HOST:PORT");
  const std::string host = args.listen.substr(0, colon);
  const int port = std::stoi(args.listen.substr(colon + 1));
  Service service(*engine);
  std::fprintf(stderr, "listening on %s:%d (trained: %s)\n", host.c_str(), port, engine->trained() ? "yes" : "no");
  if (!service.listen(host, port)) throw Error(Errc::IoFailure, "cannot listen on " + args.listen);
  return 0;
}

int run_eval(const std::string& data, const std::string& spec_path, int iterations, int k, bool as_json) {
  auto engine = open_trained(data);
  EvalSpec spec = load_eval_spec(spec_path);
  if (iterations > 0) spec.iterations = static_cast<std::size_t>(iterations);
  if (k > 0) spec.k = static_cast<std::size_t>(k);
  EvalReport report = run_session(spec, *engine);
  if (as_json) {
    std::cout << to_json(report).dump(2) << '\n';
  } else {
    std::cout << format_table(report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-based research paper recommender"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train domain and topic models and index a corpus");
  train_cmd->add_option("--corpus", train.corpus, "papers, JSON Lines")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--labeled-domains", train.labeled, "extra labeled training documents, JSON Lines")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--embeddings", train.embeddings, "word vectors, word2vec text format")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--topics", train.topics, "topics per domain")->capture_default_str();
  train_cmd->add_option("--iters", train.iterations, "Gibbs sweeps")->capture_default_str();
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--alpha", train.alpha, "doc-topic prior (default 50/topics)");
  train_cmd->add_option("--beta", train.beta)->capture_default_str();
  train_cmd->add_option("--top-m", train.top_m, "significant words per domain vector")->capture_default_str();
  train_cmd->add_option("--threshold", train.threshold, "domain cosine threshold")->capture_default_str();
  train_cmd->add_option("--out", train.out, "data directory")->required();

  std::string data;
  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP API");
  serve_cmd->add_option("--data", data)->required()->envname("TOPICREC_DATA");
  serve_cmd->add_option("--listen", serve.listen, "HOST:PORT")->capture_default_str()->envname("TOPICREC_LISTEN");
  serve_cmd->add_option("--k", serve.default_k, "results when a request omits k")
      ->capture_default_str()
      ->envname("TOPICREC_DEFAULT_K");
  serve_cmd->add_option("--update-every", serve.profile.update_every, "queries per profile update")->capture_default_str();
  serve_cmd->add_option("--in-query-rate", serve.profile.in_query_rate)->capture_default_str();
  serve_cmd->add_option("--out-of-query-rate", serve.profile.out_of_query_rate)->capture_default_str();
  serve_cmd->add_option("--stale-penalty", serve.profile.staleness_penalty)->capture_default_str();
  serve_cmd->add_option("--stale-after", serve.profile.staleness_threshold, "update cycles before a topic is stale")
      ->capture_default_str();
  serve_cmd->add_option("--truncate-eps", serve.profile.truncate_eps)->capture_default_str();
  serve_cmd->add_flag("--prominence", serve.profile.prominence_mode, "weight updates by relative frequency");

  std::string user, text;
  std::size_t k = kDefaultResultCount;
  auto* query_cmd = app.add_subcommand("query", "rank papers for a query");
  query_cmd->add_option("--data", data)->required();
  query_cmd->add_option("--user", user)->required();
  query_cmd->add_option("--text", text)->required();
  query_cmd->add_option("--k", k)->capture_default_str();

  std::string spec;
  int eval_iterations = 0;
  int eval_k = 0;
  bool as_json = false;
  auto* eval_cmd = app.add_subcommand("eval", "run the Jaccard feedback evaluation");
  eval_cmd->add_option("--data", data)->required();
  eval_cmd->add_option("--spec", spec)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--iterations", eval_iterations, "feedback rounds (overrides the --spec file)");
  eval_cmd->add_option("--k", eval_k, "retrieval depth (overrides the --spec file)");
  eval_cmd->add_flag("--json", as_json);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(train);
    if (*serve_cmd) return run_serve(data, serve);
    if (*query_cmd) return run_query(data, user, text, k);
    if (*eval_cmd) return run_eval(data, spec, eval_iterations, eval_k, as_json);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == Errc::NotTrained ? kExitNotTrained : kExitFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
