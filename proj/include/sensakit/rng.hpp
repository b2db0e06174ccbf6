#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>

namespace sensakit {

/// Seeded generator with explicit stream splitting.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The real-valued draws are computed here rather than through
/// std::*_distribution, whose algorithms are implementation-defined, so a
/// given (seed, stream, call sequence) produces the same values everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Independent child generator; children of equal (seed, path) coincide.
  Rng split(std::uint64_t child) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lower, double upper) { return lower + (upper - lower) * uniform(); }
  double normal();
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace sensakit
