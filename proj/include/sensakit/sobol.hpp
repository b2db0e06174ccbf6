#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace sensakit {

/// Unscrambled base-2 Sobol sequence in Gray-code order (Joe-Kuo direction
/// numbers, up to 21 dimensions). The leading all-zeros point is skipped, so
/// the first point is (0.5, ..., 0.5) and every coordinate takes pairwise
/// distinct values over the whole sequence.
class SobolSequence {
 public:
  static constexpr std::size_t max_dimension = 21;
  static constexpr int bits = 32;

  explicit SobolSequence(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  /// Number of points emitted so far.
  std::uint64_t index() const noexcept { return index_; }

  /// Next point, written into `out` (size == dimension()).
  void next(std::span<double> out);
  std::vector<double> next();

 private:
  std::size_t dimension_;
  std::uint64_t index_ = 0;
  std::vector<std::array<std::uint32_t, bits>> directions_;
  std::vector<std::uint32_t> state_;
};

/// The next n points of `seq` as an n x d matrix in [0, 1)^d.
Eigen::MatrixXd sobol_points(SobolSequence& seq, std::size_t n);

}  // namespace sensakit
