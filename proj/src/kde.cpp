#include "sensakit/kde.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "sensakit/error.hpp"
#include "sensakit/kernels/kde_sums.hpp"
#include "sensakit/stats.hpp"

namespace sensakit {
namespace {

constexpr std::size_t kMinSamples = 10;

}  // namespace

KdeConfig KdeConfig::fixed(double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "fixed bandwidth must be positive");
  KdeConfig cfg;
  cfg.rule = Bandwidth::fixed;
  cfg.h = h;
  return cfg;
}

double KdeConfig::bandwidth(std::size_t n) const { return rule == Bandwidth::fixed ? h : scott_bandwidth(n); }

double scott_bandwidth(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "Scott's rule needs n >= 2");
  return std::pow(static_cast<double>(n), -1.0 / 6.0);
}

std::vector<double> kde_marginal(std::span<const double> v, double h, std::span<const double> query) {
  if (v.empty()) throw Error(ErrorCode::invalid_argument, "kde_marginal needs samples");
  auto sums = kernels::gaussian_sums_1d(v, query, h);
  const double norm = 1.0 / (static_cast<double>(v.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (double& s : sums) s *= norm;
  return sums;
}

std::vector<double> kde_joint(std::span<const double> x, std::span<const double> y, double h,
                              std::span<const double> qx, std::span<const double> qy) {
  if (x.size() != y.size()) throw Error(ErrorCode::length_mismatch, "kde_joint: sample coordinates differ in length");
  if (qx.size() != qy.size()) throw Error(ErrorCode::length_mismatch, "kde_joint: query coordinates differ in length");
  if (x.empty()) throw Error(ErrorCode::invalid_argument, "kde_joint needs samples");
  auto sums = kernels::gaussian_sums_2d(x, y, qx, qy, h);
  const double norm = 1.0 / (static_cast<double>(x.size()) * h * h * 2.0 * std::numbers::pi);
  for (double& s : sums) s *= norm;
  return sums;
}

std::vector<SiEstimate> si_kde_columns(const std::vector<std::span<const double>>& xs, std::span<const double> y,
                                       Divergence div, const KdeConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = y.size();
  for (const auto& x : xs) {
    if (x.size() != n) throw Error(ErrorCode::length_mismatch, "si_kde: input and output lengths differ");
  }
  if (n < kMinSamples) throw Error(ErrorCode::invalid_argument, "si_kde needs at least 10 samples");

  const Standardized ys = column_standardize(y);
  std::vector<Standardized> xstd;
  std::vector<std::span<const double>> xspans;
  xstd.reserve(xs.size());
  for (const auto& x : xs) xstd.push_back(column_standardize(x));
  for (const auto& s : xstd) xspans.emplace_back(s.values);

  const double h = cfg.bandwidth(n);
  const kernels::PairSums sums = kernels::parallel::gaussian_pair_sums(xspans, ys.values, h);

  // With one bandwidth the density ratio collapses to sx * sy / (J * sxy):
  // the 1/(J h sqrt(2 pi)) factors of the marginals cancel against the
  // 1/(J h^2 2 pi) of the joint.
  const double J = static_cast<double>(n);
  std::vector<SiEstimate> out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ratio = sums.x[k][j] * sums.y[j] / (J * sums.joint[k][j]);
      acc += f_eval(div, ratio);
    }
    SiEstimate e;
    e.variable_index = k + 1;
    e.method = Method::sample_kde;
    e.value = acc / J;
    e.L = n;
    e.N = n;
    out.push_back(e);
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& e : out) e.wall_seconds = elapsed;
  return out;
}

SiEstimate si_kde(std::span<const double> xk, std::span<const double> y, Divergence div, const KdeConfig& cfg) {
  return si_kde_columns({xk}, y, div, cfg).front();
}

std::vector<SiEstimate> si_kde_all(const Dataset& data, Divergence div, const KdeConfig& cfg) {
  std::vector<std::span<const double>> xs;
  for (std::size_t k = 0; k < data.input_count(); ++k) xs.push_back(data.input(k));
  return si_kde_columns(xs, data.output(), div, cfg);
}

}  // namespace sensakit
