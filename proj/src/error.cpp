#include "topicrec/error.hpp"

namespace topicrec {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::IoFailure: return "IoFailure";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::EmptyDomain: return "EmptyDomain";
    case Errc::UnknownWordAll: return "UnknownWordAll";
    case Errc::NoEmbeddableTokens: return "NoEmbeddableTokens";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::DegenerateVocabulary: return "DegenerateVocabulary";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::MissingModel: return "MissingModel";
    case Errc::EmptyResult: return "EmptyResult";
    case Errc::NoVocabularyOverlap: return "NoVocabularyOverlap";
    case Errc::ZeroNormBag: return "ZeroNormBag";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::UnknownDoc: return "UnknownDoc";
    case Errc::BothEmpty: return "BothEmpty";
    case Errc::NotTrained: return "NotTrained";
    case Errc::NotFound: return "NotFound";
    case Errc::Conflict: return "Conflict";
  }
  return "Unknown";
}

}  // namespace topicrec
