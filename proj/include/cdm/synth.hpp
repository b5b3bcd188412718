#pragma once

// Uniform random draw histories for null-model checks.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Bounded integers are drawn by rejection on the raw 64-bit
// output rather than std::uniform_int_distribution (whose algorithm is
// implementation-defined), so a seed yields the same history everywhere.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

#include "cdm/ingest.hpp"

namespace cdm {

inline constexpr std::string_view kGeneratorName = "mt19937_64";

class DrawGenerator {
 public:
  explicit DrawGenerator(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  // One draw: a uniform M-subset of 1..K (ascending) or M uniform digits.
  std::vector<int> draw(const GameSpec& spec) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(spec.picks));
    if (spec.positional()) {
      for (int i = 0; i < spec.picks; ++i) out.push_back(static_cast<int>(below(10)));
      return out;
    }
    // Partial Fisher-Yates over 1..K.
    std::vector<int> pool(static_cast<std::size_t>(spec.pool));
    std::iota(pool.begin(), pool.end(), 1);
    for (std::size_t i = 0; i < static_cast<std::size_t>(spec.picks); ++i) {
      const auto j = i + below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

inline DrawHistory synthesize_history(const GameSpec& spec, std::size_t draws, std::uint64_t seed) {
  spec.validate();
  DrawGenerator gen(seed);
  std::vector<DrawRecord> records;
  records.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    records.push_back({static_cast<std::int64_t>(i), {}, gen.draw(spec)});
  }
  return DrawHistory(spec, std::move(records));
}

}  // namespace cdm
