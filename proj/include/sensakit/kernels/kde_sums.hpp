#pragma once

#include <span>
#include <vector>

namespace sensakit::kernels {

/// Unnormalised Gaussian kernel sums evaluated at the samples themselves:
///   x[k][i]     = sum_j exp(-(x_ik - x_jk)^2 / 2h^2)
///   y[i]        = sum_j exp(-(y_i - y_j)^2 / 2h^2)
///   joint[k][i] = sum_j exp(-(x_ik - x_jk)^2 / 2h^2) * exp(-(y_i - y_j)^2 / 2h^2)
/// The y weights are shared by every input column.
struct PairSums {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::vector<std::vector<double>> joint;
};

namespace serial {
/// Straight double loop with std::exp; the reference the fast path is
/// checked against.
PairSums gaussian_pair_sums(const std::vector<std::span<const double>>& xs, std::span<const double> y, double h);
}  // namespace serial

namespace parallel {
/// OpenMP over rows, 8-lane SIMD over columns. Each row is summed in a
/// fixed order, so the result does not depend on the thread count.
PairSums gaussian_pair_sums(const std::vector<std::span<const double>>& xs, std::span<const double> y, double h);
}  // namespace parallel

/// sum_j exp(-(q - s_j)^2 / 2h^2) for every query q.
std::vector<double> gaussian_sums_1d(std::span<const double> samples, std::span<const double> queries, double h);
/// Product-kernel version for query pairs (qx[i], qy[i]).
std::vector<double> gaussian_sums_2d(std::span<const double> sx, std::span<const double> sy,
                                     std::span<const double> qx, std::span<const double> qy, double h);

}  // namespace sensakit::kernels
