#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace topicrec {

struct TokenStream {
  std::vector<std::string> tokens;
  std::string source_doc_id;

  friend bool operator==(const TokenStream&, const TokenStream&) = default;
};

class StopWords {
 public:
  StopWords() = default;
  explicit StopWords(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  // One word per line, '#' starts a comment. Words are lowercased.
  static StopWords parse(std::string_view text);
  static StopWords load(const std::filesystem::path& path);
  // The bundled English list.
  static const StopWords& defaults();

  bool contains(std::string_view word) const { return words_.count(std::string(word)) != 0; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

// Porter-style suffix stripping driven by a rule table plus an irregular-form
// lookup. Rules and exceptions are re-applied until the word is a fixed point,
// so applying the lemmatizer twice is the same as applying it once.
class SuffixRules {
 public:
  struct Rule {
    std::string suffix;
    std::string replacement;
  };

  SuffixRules() = default;
  SuffixRules(std::vector<Rule> rules, std::unordered_map<std::string, std::string> exceptions,
              std::size_t min_stem = 3);

  // `suffix<TAB>replacement` per line; replacement may be empty.
  static std::vector<Rule> parse_rules(std::string_view text);
  // `word<TAB>lemma` per line.
  static std::unordered_map<std::string, std::string> parse_exceptions(std::string_view text);
  static SuffixRules load(const std::filesystem::path& rules_path,
                          const std::filesystem::path& exceptions_path = {});
  static const SuffixRules& defaults();

  std::string apply(std::string_view word) const;

  const std::vector<Rule>& rules() const { return rules_; }
  const std::unordered_map<std::string, std::string>& exceptions() const { return exceptions_; }
  std::size_t min_stem() const { return min_stem_; }

 private:
  std::vector<Rule> rules_;  // longest suffix first
  std::unordered_map<std::string, std::string> exceptions_;
  std::size_t min_stem_ = 3;
};

struct PreprocessConfig {
  StopWords stopwords = StopWords::defaults();
  SuffixRules lemmatizer_rules = SuffixRules::defaults();
  bool voice_normalization_enabled = false;
  std::size_t min_token_len = 2;

  // Stable hash of every field; token caches are keyed on it.
  std::uint64_t fingerprint() const;
};

// Lowercased runs of ASCII letters/digits (bytes >= 0x80 count as letters).
// Tokens shorter than `min_len` or without any letter are dropped.
TokenStream tokenize(std::string_view text, std::size_t min_len = 2);
TokenStream lemmatize(const TokenStream& tokens, const SuffixRules& rules);
TokenStream remove_stopwords(const TokenStream& tokens, const StopWords& stopwords);

// Splits on [.?!] followed by whitespace; the terminator stays with its sentence.
std::vector<std::string> split_sentences(std::string_view text);

// Rewrites "<subject> <be-aux> <participle> by <agent>" into
// "<agent> <participle> <subject>"; anything else is returned unchanged.
std::string voice_normalize(std::string_view sentence);

class Preprocessor {
 public:
  Preprocessor() : Preprocessor(PreprocessConfig{}) {}
  explicit Preprocessor(PreprocessConfig config);

  // tokenize -> stop words -> lemmatize -> stop words, with optional voice
  // normalization per sentence first.
  TokenStream run(std::string_view text, std::string doc_id = {}) const;

  const PreprocessConfig& config() const { return config_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  PreprocessConfig config_;
  std::uint64_t fingerprint_;
};

}  // namespace topicrec
