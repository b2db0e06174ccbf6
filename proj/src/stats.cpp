#include "sensakit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sensakit/error.hpp"

namespace sensakit {

double mean(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::invalid_argument, "mean of an empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) throw Error(ErrorCode::invalid_argument, "sample std needs at least two values");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Standardized column_standardize(std::span<const double> v) {
  if (v.size() < 2) throw Error(ErrorCode::degenerate_column, "need at least two values to standardize");
  if (is_constant(v)) throw Error(ErrorCode::degenerate_column, "column has zero variance");
  Standardized out;
  out.mean = mean(v);
  out.std = sample_std(v);
  if (!(out.std > 0.0)) throw Error(ErrorCode::degenerate_column, "column has zero variance");
  out.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.values[i] = (v[i] - out.mean) / out.std;
  return out;
}

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

std::vector<std::size_t> ordinal_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<std::size_t> rank(v.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = r;
    i = j + 1;
  }
  return rank;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::length_mismatch, "pearson: lengths differ");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

}  // namespace sensakit
