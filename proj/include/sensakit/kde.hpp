#pragma once

#include <span>
#include <vector>

#include "sensakit/dataset.hpp"
#include "sensakit/divergence.hpp"
#include "sensakit/estimate.hpp"

namespace sensakit {

struct KdeConfig {
  enum class Bandwidth { scott, fixed };
  enum class Kernel { gaussian };

  Bandwidth rule = Bandwidth::scott;
  double h = 0.0;  // used when rule == fixed
  Kernel kernel = Kernel::gaussian;

  static KdeConfig scott() { return {}; }
  static KdeConfig fixed(double h);

  /// Bandwidth for a sample of size n on standardized data.
  double bandwidth(std::size_t n) const;
};

/// Scott's rule for a 2-D product kernel on unit-variance data: n^(-1/6).
double scott_bandwidth(std::size_t n);

/// Gaussian KDE of the samples `v` evaluated at `query`.
std::vector<double> kde_marginal(std::span<const double> v, double h, std::span<const double> query);
/// Product-kernel KDE, same bandwidth in both coordinates.
std::vector<double> kde_joint(std::span<const double> x, std::span<const double> y, double h,
                              std::span<const double> qx, std::span<const double> qy);

/// Plug-in f-divergence index: the sample mean over j of
/// f( f_X(x_j) f_Y(y_j) / f_XY(x_j, y_j) ), densities from KDE on the
/// standardized columns. Requires J >= 10 and non-constant columns.
SiEstimate si_kde(std::span<const double> xk, std::span<const double> y, Divergence div, const KdeConfig& cfg);

/// si_kde for every input of `data` against its output. The output-side
/// kernel weights are computed once and shared across inputs.
std::vector<SiEstimate> si_kde_all(const Dataset& data, Divergence div, const KdeConfig& cfg);

/// Same as si_kde_all on raw columns.
std::vector<SiEstimate> si_kde_columns(const std::vector<std::span<const double>>& xs, std::span<const double> y,
                                       Divergence div, const KdeConfig& cfg);

}  // namespace sensakit
