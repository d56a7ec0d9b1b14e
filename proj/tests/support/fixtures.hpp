#pragma once

// Deterministic corpora and models shared by the unit and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "topicrec/embeddings.hpp"
#include "topicrec/engine.hpp"
#include "topicrec/eval.hpp"
#include "topicrec/preprocess.hpp"
#include "topicrec/topic_model.hpp"

namespace topicrec::testing {

inline const std::vector<std::string> kFruitWords = {"apple", "banana", "fruit"};
inline const std::vector<std::string> kHardwareWords = {"cpu", "gpu", "cache"};

// 20 fruit-only documents then 20 hardware-only documents, 8 tokens each.
std::vector<TokenStream> two_theme_corpus(std::uint64_t seed = 7);

// K = 2, 200 sweeps, alpha = 0.1, beta = 0.01.
LdaConfig toy_lda_config(std::uint64_t seed);

// Token-weighted purity of the word -> argmax-topic map over the toy corpus:
// sum over topics of the majority-theme token count, divided by all tokens.
// 0.5 when both themes collapse onto one topic, 1.0 for perfect separation.
double toy_purity(const InvertedIndex& index, const std::vector<TokenStream>& corpus);

// Fruit words along axis 0, hardware words along axis 1.
EmbeddingStore toy_embeddings();

// The two-theme corpus as documents labeled FRU and HW.
std::vector<Document> toy_documents();

// Writes a data directory (hand-built MAT/CS/HUM models, embeddings, domain
// vectors and two papers) in which the query text below is represented as
// 5 MAT1 + 6 CS3 + 2 HUM4 and papers r1, r2 as 4 MAT1 + 1 CS3 + 3 CS6 and
// 5 MAT9 + 1 CS3 + 1 HUM4.
void write_worked_example(const std::filesystem::path& dir);
std::string worked_example_query();

// Fifteen themes, one domain each, pure labeled papers per theme, unlabeled
// mixed papers per (query theme, planted theme) pair, and 15 evaluation users
// whose desired papers are their pair's mixes.
struct PlantedWorld {
  std::vector<std::vector<std::string>> theme_words;  // surface forms
  std::vector<std::string> theme_domain;              // domain tag per theme
  std::vector<Document> documents;
  EmbeddingStore embeddings{15};
  EvalSpec spec;
};

PlantedWorld planted_world();

// corpus.jsonl, embeddings.txt and spec.json for the command-line tools.
void write_planted_files(const PlantedWorld& world, const std::filesystem::path& dir);

// Trains an engine on the planted world (K = 2 per domain).
TrainOptions planted_train_options(std::uint64_t seed = 11);

}  // namespace topicrec::testing
