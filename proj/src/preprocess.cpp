#include "topicrec/preprocess.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <sstream>

#include "topicrec/error.hpp"
#include "topicrec/hash.hpp"

namespace topicrec {

namespace resources {
extern const std::string_view kStopWords;
extern const std::string_view kSuffixRules;
extern const std::string_view kLemmaExceptions;
}  // namespace resources

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || u >= 0x80;
}

bool has_letter(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || static_cast<unsigned char>(c) >= 0x80;
  });
}

// Calls fn(line) for each line with comments and surrounding blanks removed.
// Tabs inside the line are kept.
template <typename Fn>
void for_each_data_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (!line.empty()) fn(line);
    pos = end + 1;
  }
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

constexpr std::array<std::string_view, 8> kBeAux = {"am", "is", "are", "was", "were", "be", "been", "being"};

}  // namespace

StopWords StopWords::parse(std::string_view text) {
  std::unordered_set<std::string> words;
  for_each_data_line(text, [&](std::string_view line) { words.insert(to_lower(line)); });
  return StopWords(std::move(words));
}

StopWords StopWords::load(const std::filesystem::path& path) { return parse(read_file(path)); }

const StopWords& StopWords::defaults() {
  static const StopWords words = parse(resources::kStopWords);
  return words;
}

SuffixRules::SuffixRules(std::vector<Rule> rules, std::unordered_map<std::string, std::string> exceptions,
                         std::size_t min_stem)
    : rules_(std::move(rules)), exceptions_(std::move(exceptions)), min_stem_(min_stem) {
  std::stable_sort(rules_.begin(), rules_.end(),
                   [](const Rule& a, const Rule& b) { return a.suffix.size() > b.suffix.size(); });
}

std::vector<SuffixRules::Rule> SuffixRules::parse_rules(std::string_view text) {
  std::vector<Rule> rules;
  for_each_data_line(text, [&](std::string_view line) {
    auto tab = line.find('\t');
    std::string_view suffix = line.substr(0, tab);
    std::string_view replacement = tab == std::string_view::npos ? std::string_view{} : line.substr(tab + 1);
    if (!suffix.empty()) rules.push_back({to_lower(suffix), to_lower(replacement)});
  });
  return rules;
}

std::unordered_map<std::string, std::string> SuffixRules::parse_exceptions(std::string_view text) {
  std::unordered_map<std::string, std::string> table;
  for_each_data_line(text, [&](std::string_view line) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) return;
    table[to_lower(line.substr(0, tab))] = to_lower(line.substr(tab + 1));
  });
  return table;
}

SuffixRules SuffixRules::load(const std::filesystem::path& rules_path,
                              const std::filesystem::path& exceptions_path) {
  auto exceptions = exceptions_path.empty() ? std::unordered_map<std::string, std::string>{}
                                            : parse_exceptions(read_file(exceptions_path));
  return SuffixRules(parse_rules(read_file(rules_path)), std::move(exceptions));
}

const SuffixRules& SuffixRules::defaults() {
  static const SuffixRules rules(parse_rules(resources::kSuffixRules),
                                 parse_exceptions(resources::kLemmaExceptions));
  return rules;
}

std::string SuffixRules::apply(std::string_view word) const {
  std::string w(word);
  // Every non-guard step shortens the word or swaps in an exception, so the
  // bound only matters for pathological tables (e.g. exception cycles).
  for (int step = 0; step < 64; ++step) {
    if (auto it = exceptions_.find(w); it != exceptions_.end() && it->second != w) {
      w = it->second;
      continue;
    }
    const Rule* hit = nullptr;
    for (const Rule& rule : rules_) {
      if (w.size() < rule.suffix.size() || w.compare(w.size() - rule.suffix.size(), rule.suffix.size(), rule.suffix) != 0) {
        continue;
      }
      bool guard = rule.suffix == rule.replacement;
      if (guard || w.size() - rule.suffix.size() >= min_stem_) {
        hit = &rule;
        break;
      }
    }
    if (hit == nullptr || hit->suffix == hit->replacement) break;
    std::string next = w.substr(0, w.size() - hit->suffix.size()) + hit->replacement;
    if (next.size() >= w.size()) break;
    w = std::move(next);
  }
  return w;
}

std::uint64_t PreprocessConfig::fingerprint() const {
  Fnv1a h;
  std::vector<std::string> words(stopwords.words().begin(), stopwords.words().end());
  std::sort(words.begin(), words.end());
  for (const auto& w : words) h.update(w).update(std::string_view("\n", 1));
  h.update_u64(words.size());
  for (const auto& r : lemmatizer_rules.rules()) h.update(r.suffix).update("\t").update(r.replacement).update("\n");
  std::vector<std::pair<std::string, std::string>> exc(lemmatizer_rules.exceptions().begin(),
                                                       lemmatizer_rules.exceptions().end());
  std::sort(exc.begin(), exc.end());
  for (const auto& [k, v] : exc) h.update(k).update("\t").update(v).update("\n");
  h.update_u64(lemmatizer_rules.min_stem());
  h.update_u64(voice_normalization_enabled ? 1 : 0);
  h.update_u64(min_token_len);
  return h.digest();
}

TokenStream tokenize(std::string_view text, std::size_t min_len) {
  TokenStream out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && is_word_byte(text[i])) ++i;
    if (i == start) continue;
    std::string token = to_lower(text.substr(start, i - start));
    if (token.size() >= min_len && has_letter(token)) out.tokens.push_back(std::move(token));
  }
  return out;
}

TokenStream lemmatize(const TokenStream& tokens, const SuffixRules& rules) {
  TokenStream out{{}, tokens.source_doc_id};
  out.tokens.reserve(tokens.tokens.size());
  for (const auto& t : tokens.tokens) out.tokens.push_back(rules.apply(t));
  return out;
}

TokenStream remove_stopwords(const TokenStream& tokens, const StopWords& stopwords) {
  TokenStream out{{}, tokens.source_doc_id};
  std::copy_if(tokens.tokens.begin(), tokens.tokens.end(), std::back_inserter(out.tokens),
               [&](const std::string& t) { return !stopwords.contains(t); });
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool boundary = (c == '.' || c == '?' || c == '!') && i + 1 < text.size() &&
                    (text[i + 1] == ' ' || text[i + 1] == '\n' || text[i + 1] == '\t' || text[i + 1] == '\r');
    if (boundary) {
      sentences.emplace_back(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  if (start < text.size()) sentences.emplace_back(text.substr(start));
  return sentences;
}

std::string voice_normalize(std::string_view sentence) {
  std::vector<std::string> words;
  std::istringstream is{std::string(sentence)};
  for (std::string w; is >> w;) words.push_back(std::move(w));

  std::string terminator;
  if (!words.empty()) {
    std::string& last = words.back();
    while (!last.empty() && (last.back() == '.' || last.back() == '?' || last.back() == '!')) {
      terminator.insert(terminator.begin(), last.back());
      last.pop_back();
    }
    if (last.empty()) words.pop_back();
  }

  const std::size_t n = words.size();
  for (std::size_t i = 1; i + 3 < n; ++i) {
    std::string aux = to_lower(words[i]);
    if (std::find(kBeAux.begin(), kBeAux.end(), aux) == kBeAux.end()) continue;
    if (to_lower(words[i + 2]) != "by") continue;
    std::vector<std::string> out(words.begin() + static_cast<std::ptrdiff_t>(i + 3), words.end());
    out.push_back(words[i + 1]);
    out.insert(out.end(), words.begin(), words.begin() + static_cast<std::ptrdiff_t>(i));
    std::string joined;
    for (const auto& w : out) {
      if (!joined.empty()) joined += ' ';
      joined += w;
    }
    return joined + terminator;
  }
  return std::string(sentence);
}

Preprocessor::Preprocessor(PreprocessConfig config)
    : config_(std::move(config)), fingerprint_(config_.fingerprint()) {}

TokenStream Preprocessor::run(std::string_view text, std::string doc_id) const {
  TokenStream raw;
  if (config_.voice_normalization_enabled) {
    std::string normalized;
    for (const auto& s : split_sentences(text)) {
      normalized += voice_normalize(s);
      normalized += ' ';
    }
    raw = tokenize(normalized, config_.min_token_len);
  } else {
    raw = tokenize(text, config_.min_token_len);
  }
  TokenStream out = remove_stopwords(lemmatize(remove_stopwords(raw, config_.stopwords), config_.lemmatizer_rules),
                                     config_.stopwords);
  std::erase_if(out.tokens, [&](const std::string& t) { return t.size() < config_.min_token_len || !has_letter(t); });
  out.source_doc_id = std::move(doc_id);
  return out;
}

}  // namespace topicrec
