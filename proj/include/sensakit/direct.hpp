#pragma once

#include <cstddef>
#include <vector>

#include "sensakit/dataset.hpp"
#include "sensakit/estimate.hpp"
#include "sensakit/gp.hpp"
#include "sensakit/kde.hpp"
#include "sensakit/mst.hpp"
#include "sensakit/sobol.hpp"

namespace sensakit {

/// Column-wise index permutations taken from the ranks of a Sobol prefix.
/// ranks[j][i] is the 0-based rank of point i in Sobol coordinate j.
struct PermutationPlan {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::vector<std::size_t>> ranks;
  /// True when some coordinate repeated a value; ties were broken by index.
  bool had_ties = false;
};

/// Ranks of the next n points of `seq` per coordinate.
PermutationPlan build_permutation_plan(std::size_t n, std::size_t d, SobolSequence& seq);
/// Same, from a fresh sequence of dimension d.
PermutationPlan build_permutation_plan(std::size_t n, std::size_t d);

/// Row i of column j becomes the ranks[j][i]-th smallest value of X^j.
/// Marginal multisets are preserved exactly; cross-column dependence is
/// replaced by that of the Sobol design.
Dataset apply_permutation(const Dataset& x, const PermutationPlan& plan);

struct DirectOptions {
  enum class Estimator { kde, mst };
  Estimator estimator = Estimator::mst;
  KdeConfig kde = KdeConfig::scott();
  MstCalibration mst{};  // must be calibrated at n = rows of X
};

/// Direct index of every input: outputs Y~ = model mean at Pi(X), then the
/// Hellinger estimator on (Pi(X^k), Y~). A constant Y~ means the surrogate
/// ignores its inputs, so every index is 0.
std::vector<SiEstimate> si_direct_all(const Dataset& x, const GpModel& model, const DirectOptions& options);
std::vector<SiEstimate> si_direct_all(const Dataset& x, const GpModel& model, const DirectOptions& options,
                                      const PermutationPlan& plan);

/// Single variable, k 0-based.
SiEstimate si_direct(const Dataset& x, std::size_t k, const GpModel& model, const DirectOptions& options);

}  // namespace sensakit
