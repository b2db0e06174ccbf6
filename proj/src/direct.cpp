#include "sensakit/direct.hpp"

#include <algorithm>
#include <chrono>

#include "sensakit/error.hpp"
#include "sensakit/sampling.hpp"
#include "sensakit/stats.hpp"

namespace sensakit {

PermutationPlan build_permutation_plan(std::size_t n, std::size_t d, SobolSequence& seq) {
  if (d == 0) throw Error(ErrorCode::invalid_argument, "permutation plan: need d >= 1");
  if (seq.dimension() < d) throw Error(ErrorCode::dimension_mismatch, "permutation plan: Sobol dimension too small");
  std::vector<std::vector<double>> coords(d, std::vector<double>(n));
  std::vector<double> point(seq.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    seq.next(point);
    for (std::size_t j = 0; j < d; ++j) coords[j][i] = point[j];
  }
  PermutationPlan plan;
  plan.n = n;
  plan.d = d;
  for (std::size_t j = 0; j < d; ++j) {
    plan.ranks.push_back(ordinal_ranks(coords[j]));
    std::vector<double> sorted = coords[j];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) plan.had_ties = true;
  }
  return plan;
}

PermutationPlan build_permutation_plan(std::size_t n, std::size_t d) {
  SobolSequence seq(d);
  return build_permutation_plan(n, d, seq);
}

Dataset apply_permutation(const Dataset& x, const PermutationPlan& plan) {
  if (plan.n != x.size()) throw Error(ErrorCode::length_mismatch, "apply_permutation: plan built for another size");
  if (plan.d != x.input_count()) {
    throw Error(ErrorCode::dimension_mismatch, "apply_permutation: plan built for another dimension");
  }
  std::vector<Column> cols;
  for (std::size_t j = 0; j < plan.d; ++j) {
    Column c = x.input_column(j);
    std::vector<double> sorted = c.values;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < plan.n; ++i) c.values[i] = sorted[plan.ranks[j][i]];
    cols.push_back(std::move(c));
  }
  return Dataset(std::move(cols), "permuted");
}

std::vector<SiEstimate> si_direct_all(const Dataset& x, const GpModel& model, const DirectOptions& options,
                                      const PermutationPlan& plan) {
  const auto start = std::chrono::steady_clock::now();
  const Dataset px = apply_permutation(x, plan);
  const Eigen::VectorXd yt = model.predict_mean(input_matrix(px));
  const std::span<const double> y(yt.data(), static_cast<std::size_t>(yt.size()));
  const bool mst = options.estimator == DirectOptions::Estimator::mst;

  std::vector<SiEstimate> out;
  if (is_constant(y)) {
    for (std::size_t k = 0; k < px.input_count(); ++k) {
      SiEstimate e;
      e.variable_index = k + 1;
      e.value = 0.0;
      out.push_back(e);
    }
  } else if (mst) {
    for (std::size_t k = 0; k < px.input_count(); ++k) {
      SiEstimate e = si_mst(px.input(k), y, options.mst);
      e.variable_index = k + 1;
      out.push_back(e);
    }
  } else {
    std::vector<std::span<const double>> xs;
    for (std::size_t k = 0; k < px.input_count(); ++k) xs.push_back(px.input(k));
    out = si_kde_columns(xs, y, Divergence::hellinger, options.kde);
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& e : out) {
    e.method = mst ? Method::direct_mst : Method::direct_kde;
    e.L = model.training_size();
    e.N = x.size();
    e.seed = mst ? options.mst.seed : 0;
    e.wall_seconds = elapsed;
  }
  return out;
}

std::vector<SiEstimate> si_direct_all(const Dataset& x, const GpModel& model, const DirectOptions& options) {
  return si_direct_all(x, model, options, build_permutation_plan(x.size(), x.input_count()));
}

SiEstimate si_direct(const Dataset& x, std::size_t k, const GpModel& model, const DirectOptions& options) {
  if (k >= x.input_count()) throw Error(ErrorCode::invalid_argument, "si_direct: variable index out of range");
  return si_direct_all(x, model, options).at(k);
}

}  // namespace sensakit
