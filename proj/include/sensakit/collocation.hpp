#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sensakit/dataset.hpp"

namespace sensakit {

/// The m roots of the Legendre polynomial P_m on [-1, 1], ascending.
std::vector<double> gauss_legendre_nodes(std::size_t m);

/// Tensor-grid Lagrange interpolant through model values at Gauss-Legendre
/// nodes. Grid values are stored with the first dimension varying fastest.
class ScModel {
 public:
  ScModel(std::vector<Bounds> bounds, std::size_t m, std::vector<double> values);

  std::size_t dimension() const noexcept { return bounds_.size(); }
  std::size_t nodes_per_dimension() const noexcept { return m_; }
  const std::vector<Bounds>& bounds() const noexcept { return bounds_; }
  /// Collocation nodes of dimension j in physical coordinates.
  const std::vector<double>& nodes(std::size_t j) const { return nodes_[j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Physical coordinates of grid point `flat`.
  std::vector<double> grid_point(std::size_t flat) const;

  double interpolate(std::span<const double> x) const;

 private:
  std::vector<Bounds> bounds_;
  std::size_t m_;
  std::vector<std::vector<double>> nodes_;
  std::vector<double> reference_;  // nodes on [-1, 1]
  std::vector<double> weights_;    // Lagrange denominators per node
  std::vector<double> values_;
};

using Evaluator = std::function<double(std::span<const double>)>;

/// m^d evaluations of `model` on the tensor grid. Throws budget_exceeded
/// when m^d > budget, before any evaluation.
ScModel sc_build(const std::vector<Bounds>& bounds, std::size_t m, const Evaluator& model,
                 std::size_t budget = std::numeric_limits<std::size_t>::max());

/// Interpolated values at the rows of `x`.
Eigen::VectorXd sc_interpolate(const ScModel& model, const Eigen::MatrixXd& x);

/// Largest m with m^d <= budget (0 when even 1 does not fit).
std::size_t sc_nodes_for_budget(std::size_t d, std::size_t budget);

}  // namespace sensakit
