#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace topicrec {

// True for 1-4 uppercase ASCII letters ("CS", "MAT", "D").
bool is_valid_domain_tag(std::string_view tag);

// Namespaced topic: domain tag + zero-based index, printed as "CS3".
struct TopicId {
  std::string domain;
  std::uint32_t index = 0;

  std::string to_string() const;
  // Throws Error(InvalidArgument) unless `text` is <tag><digits>.
  static TopicId parse(std::string_view text);

  friend auto operator<=>(const TopicId&, const TopicId&) = default;
  friend bool operator==(const TopicId&, const TopicId&) = default;
};

}  // namespace topicrec
