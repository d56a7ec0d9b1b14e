#pragma once

#include <cstdint>
#include <random>

namespace topicrec {

// mt19937_64 with hand-rolled conversions: std::uniform_*_distribution is
// implementation-defined and would break bit-identical models across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace topicrec
