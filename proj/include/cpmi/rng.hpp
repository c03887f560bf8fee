#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace cpmi {

/// Counter-based generator: output k of a stream is a pure function of
/// (key, k), so per-sentence substreams do not depend on scheduling.
/// Output is the SplitMix64 finalizer applied to key + k * golden gamma.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Substream for item `index` of a run seeded with `seed`.
  static CounterRng substream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer on [0, bound). Unbiased (Lemire's method).
  std::uint64_t below(std::uint64_t bound);

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace cpmi
