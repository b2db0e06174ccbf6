#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sensakit {

double mean(std::span<const double> v);
/// Sample standard deviation, n - 1 denominator.
double sample_std(std::span<const double> v);

struct Standardized {
  std::vector<double> values;
  double mean = 0.0;
  double std = 1.0;

  double invert(double z) const { return mean + std * z; }
};

/// Shift to zero mean and scale to unit sample standard deviation.
/// Throws ErrorCode::degenerate_column for constant input or n < 2.
Standardized column_standardize(std::span<const double> v);

bool is_constant(std::span<const double> v);

/// 0-based ordinal ranks; equal values are ranked by position.
std::vector<std::size_t> ordinal_ranks(std::span<const double> v);
/// 1-based mid-ranks (ties share the average rank).
std::vector<double> average_ranks(std::span<const double> v);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace sensakit
