#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace topicrec {

enum class Errc {
  IoFailure,
  MalformedHeader,
  DimensionMismatch,
  ZeroVector,
  EmptyDomain,
  UnknownWordAll,
  NoEmbeddableTokens,
  EmptyCorpus,
  DegenerateVocabulary,
  VersionMismatch,
  ChecksumMismatch,
  MissingModel,
  EmptyResult,
  NoVocabularyOverlap,
  ZeroNormBag,
  MalformedLine,
  DuplicateId,
  InvalidConfig,
  InvalidArgument,
  UnknownDoc,
  BothEmpty,
  NotTrained,
  NotFound,
  Conflict,
};

std::string_view to_string(Errc code);

// All library failures are reported through this exception type; `code()`
// identifies the failure class, `line()` is set for line-oriented parsers.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::size_t line = 0)
      : std::runtime_error(message), code_(code), line_(line) {}

  Errc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  Errc code_;
  std::size_t line_;
};

}  // namespace topicrec
