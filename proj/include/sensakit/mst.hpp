#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

#include "sensakit/estimate.hpp"
#include "sensakit/kernels/prim.hpp"

namespace sensakit {

/// Point sets the MST length is averaged over.
///   uniform: n i.i.d. uniform points on [0,1]^2.
///   ranks:   a random permutation lattice ((i + 1/2) / n, (pi(i) + 1/2) / n),
///            which is exactly what copula_transform makes of independent
///            columns. Calibrating on it makes si_mst mean-zero under
///            independence at every n.
enum class BetaSample { uniform, ranks };
std::string_view to_string(BetaSample s) noexcept;
std::optional<BetaSample> beta_sample_from_string(std::string_view s) noexcept;

/// Finite-n normalising constant of the MST length functional:
/// beta = mean over n_rep samples U_n of L_1(U_n) / sqrt(n).
struct MstCalibration {
  double beta = 0.0;
  std::size_t n = 0;
  std::size_t d = 2;
  double gamma = 1.0;
  std::size_t n_rep = 0;
  std::uint64_t seed = 0;
  BetaSample sample = BetaSample::uniform;
};

inline constexpr std::size_t kDefaultBetaReps = 50;
/// Calibration used by the estimators in si and experiments.
inline constexpr BetaSample kEstimatorBetaSample = BetaSample::ranks;

/// Exact Euclidean MST of the points (x[i], y[i]).
MstResult euclidean_mst(std::span<const double> x, std::span<const double> y);

/// Repetition r draws its points from Rng(seed).split(r); the mean is
/// accumulated in repetition order, so the result is independent of threads.
MstCalibration estimate_beta(std::size_t n, std::size_t n_rep, std::uint64_t seed,
                             BetaSample sample = BetaSample::uniform);

/// Renyi entropy estimate of order 1/2 for 2-D points:
/// 2 * log(L_1 / (beta * sqrt(n))).
double renyi_entropy_half(std::span<const double> x, std::span<const double> y, double beta);

/// Empirical-CDF map of a column to (0, 1): (rank + 1/2) / n, ties by position.
std::vector<double> copula_transform(std::span<const double> v);

/// Hellinger index from the MST length of the rank-transformed pairs:
/// 2 - 2 * L_1 / (beta * sqrt(n)). A constant column carries no
/// information about the other one, so its index is exactly 0.
SiEstimate si_mst(std::span<const double> xk, std::span<const double> y, const MstCalibration& cal);

/// Thread-safe memo of calibrations, optionally backed by a CSV file with
/// rows "n,d,gamma,n_rep,seed,beta,sample". Rows without the sample column
/// are uniform calibrations. New rows are appended with a single O_APPEND
/// write, so concurrent writers never interleave within a row.
class BetaCache {
 public:
  BetaCache() = default;
  explicit BetaCache(std::filesystem::path file);

  /// Cached value if present, else computed, stored and appended.
  MstCalibration get(std::size_t n, std::size_t n_rep, std::uint64_t seed, BetaSample sample);
  std::optional<MstCalibration> find(std::size_t n, std::size_t n_rep, std::uint64_t seed, BetaSample sample) const;
  void insert(const MstCalibration& cal);
  std::size_t size() const;

  static std::vector<MstCalibration> read_file(const std::filesystem::path& file);
  static void append_row(const std::filesystem::path& file, const MstCalibration& cal);

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::uint64_t, BetaSample>;
  mutable std::mutex mutex_;
  std::map<Key, MstCalibration> entries_;
  std::optional<std::filesystem::path> file_;
};

}  // namespace sensakit
