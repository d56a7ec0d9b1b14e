// Serial vs OpenMP timings for the three data-parallel kernels.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "topicrec/kernels.hpp"
#include "topicrec/rng.hpp"

using namespace topicrec;

namespace {

std::vector<double> random_matrix(std::size_t rows, std::size_t cols) {
  Rng rng(1);
  std::vector<double> m(rows * cols);
  for (auto& x : m) x = rng.uniform();
  return m;
}

template <bool Parallel>
void BM_ColumnArgmax(benchmark::State& state) {
  const std::size_t rows = 50, cols = static_cast<std::size_t>(state.range(0));
  const auto phi = random_matrix(rows, cols);
  for (auto _ : state) {
    auto out = Parallel ? kernels::column_argmax(phi, rows, cols) : kernels::serial::column_argmax(phi, rows, cols);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * cols));
}

struct CandidatePool {
  std::vector<std::string> ids;
  std::vector<BagOfTopics> bags;
  std::vector<Candidate> candidates;
  BagOfTopics query;

  explicit CandidatePool(std::size_t n) {
    Rng rng(2);
    auto bag = [&] {
      BagOfTopics b;
      for (int i = 0; i < 12; ++i) b.add(TopicId{rng.below(2) ? "CS" : "MAT", rng.below(20)}, 1 + rng.below(5));
      return b;
    };
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("doc" + std::to_string(i));
      bags.push_back(bag());
    }
    for (std::size_t i = 0; i < n; ++i) candidates.push_back({ids[i], &bags[i]});
    query = bag();
  }
};

template <bool Parallel>
void BM_ScoreCandidates(benchmark::State& state) {
  const CandidatePool pool(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = Parallel ? kernels::score_candidates(pool.query, pool.candidates)
                        : kernels::serial::score_candidates(pool.query, pool.candidates);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Two domains with a 2000-word vocabulary each, topics assigned round-robin.
struct InferenceWorld {
  ModelSet models;
  std::vector<TokenStream> docs;
  std::vector<DomainAssignment> assignments;

  explicit InferenceWorld(std::size_t n) {
    constexpr std::size_t kVocab = 2000;
    std::vector<std::string> words;
    for (std::size_t w = 0; w < kVocab; ++w) words.push_back("w" + std::to_string(w));
    for (const char* tag : {"CS", "MAT"}) {
      LdaConfig cfg;
      cfg.topics = 20;
      cfg.iterations = 20;
      cfg.seed = tag[0];
      Rng rng(cfg.seed);
      std::vector<TokenStream> corpus;
      for (int d = 0; d < 200; ++d) {
        TokenStream s{{}, std::string(tag) + std::to_string(d)};
        for (int t = 0; t < 60; ++t) s.tokens.push_back(words[rng.below(kVocab)]);
        corpus.push_back(std::move(s));
      }
      auto r = train_lda(corpus, cfg, tag);
      auto index = build_inverted_index(r.model);
      models.emplace(tag, DomainTopicModel{std::move(r.model), std::move(index)});
    }
    Rng rng(3);
    for (std::size_t i = 0; i < n; ++i) {
      TokenStream d{{}, "d" + std::to_string(i)};
      for (int t = 0; t < 150; ++t) d.tokens.push_back(words[rng.below(kVocab)]);
      assignments.push_back({d.source_doc_id, {{"CS", 0.9}, {"MAT", 0.6}}});
      docs.push_back(std::move(d));
    }
  }
};

template <bool Parallel>
void BM_InferBags(benchmark::State& state) {
  const InferenceWorld world(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = Parallel ? kernels::infer_bags(world.docs, world.assignments, world.models)
                        : kernels::serial::infer_bags(world.docs, world.assignments, world.models);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ColumnArgmax<false>)->Name("column_argmax/serial")->Arg(2000)->Arg(50000);
BENCHMARK(BM_ColumnArgmax<true>)->Name("column_argmax/omp")->Arg(2000)->Arg(50000);
BENCHMARK(BM_ScoreCandidates<false>)->Name("score_candidates/serial")->Arg(1000)->Arg(100000);
BENCHMARK(BM_ScoreCandidates<true>)->Name("score_candidates/omp")->Arg(1000)->Arg(100000);
BENCHMARK(BM_InferBags<false>)->Name("infer_bags/serial")->Arg(100)->Arg(5000);
BENCHMARK(BM_InferBags<true>)->Name("infer_bags/omp")->Arg(100)->Arg(5000);

BENCHMARK_MAIN();
