#include "sensakit/collocation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sensakit/error.hpp"

namespace sensakit {
namespace {

// m^d, or nullopt-like max on overflow.
std::size_t checked_power(std::size_t m, std::size_t d) {
  std::size_t p = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (m != 0 && p > std::numeric_limits<std::size_t>::max() / m) return std::numeric_limits<std::size_t>::max();
    p *= m;
  }
  return p;
}

}  // namespace

std::vector<double> gauss_legendre_nodes(std::size_t m) {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "gauss-legendre: need m >= 1");
  std::vector<double> x(m);
  const double dm = static_cast<double>(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on the three-term recurrence.
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dm + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= m; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * z * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_m(z), p0 = P_{m-1}(z)
      const double dp = m == 1 ? 1.0 : dm * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
  }
  if (m % 2 == 1) x[m / 2] = 0.0;
  return x;
}

ScModel::ScModel(std::vector<Bounds> bounds, std::size_t m, std::vector<double> values)
    : bounds_(std::move(bounds)), m_(m), values_(std::move(values)) {
  if (m_ < 1) throw Error(ErrorCode::invalid_argument, "sc: need m >= 1");
  if (values_.size() != checked_power(m_, bounds_.size())) {
    throw Error(ErrorCode::length_mismatch, "sc: grid value count differs from m^d");
  }
  reference_ = gauss_legendre_nodes(m_);
  const std::vector<double>& ref = reference_;
  nodes_.resize(bounds_.size());
  for (std::size_t j = 0; j < bounds_.size(); ++j) {
    const Bounds& b = bounds_[j];
    if (!(b.width() > 0.0)) throw Error(ErrorCode::invalid_argument, "sc: bounds must have positive width");
    nodes_[j].resize(m_);
    for (std::size_t i = 0; i < m_; ++i) nodes_[j][i] = b.lower + 0.5 * (ref[i] + 1.0) * b.width();
  }
  // Denominators prod_{r != i} (t_i - t_r) on the reference interval; the
  // affine map scales numerator and denominator alike.
  weights_.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    double w = 1.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r != i) w *= ref[i] - ref[r];
    }
    weights_[i] = w;
  }
}

std::vector<double> ScModel::grid_point(std::size_t flat) const {
  std::vector<double> p(bounds_.size());
  for (std::size_t j = 0; j < bounds_.size(); ++j) {
    p[j] = nodes_[j][flat % m_];
    flat /= m_;
  }
  return p;
}

double ScModel::interpolate(std::span<const double> x) const {
  const std::size_t d = bounds_.size();
  if (x.size() != d) throw Error(ErrorCode::dimension_mismatch, "sc interpolate: query dimension differs");
  // basis[j][i] = l_i(t_j) with t the query mapped to [-1, 1].
  const std::vector<double>& ref_nodes = reference_;
  std::vector<std::vector<double>> basis(d, std::vector<double>(m_));
  for (std::size_t j = 0; j < d; ++j) {
    const double t = 2.0 * (x[j] - bounds_[j].lower) / bounds_[j].width() - 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      double num = 1.0;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r != i) num *= t - ref_nodes[r];
      }
      basis[j][i] = num / weights_[i];
    }
  }
  // Contract one dimension at a time, first dimension fastest.
  std::vector<double> cur = values_;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> next(cur.size() / m_);
    for (std::size_t o = 0; o < next.size(); ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m_; ++i) acc += basis[j][i] * cur[o * m_ + i];
      next[o] = acc;
    }
    cur = std::move(next);
  }
  return cur[0];
}

ScModel sc_build(const std::vector<Bounds>& bounds, std::size_t m, const Evaluator& model, std::size_t budget) {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "sc build: need m >= 1");
  if (bounds.empty()) throw Error(ErrorCode::invalid_argument, "sc build: need at least one dimension");
  const std::size_t count = checked_power(m, bounds.size());
  if (count > budget) {
    throw Error(ErrorCode::budget_exceeded, "sc build: grid of " + std::to_string(m) + "^" +
                                                std::to_string(bounds.size()) + " points exceeds budget " +
                                                std::to_string(budget));
  }
  // Build an empty-valued model first to get the node layout.
  ScModel layout(bounds, m, std::vector<double>(count, 0.0));
  std::vector<double> values(count);
  for (std::size_t flat = 0; flat < count; ++flat) {
    const auto p = layout.grid_point(flat);
    values[flat] = model(p);
  }
  return ScModel(bounds, m, std::move(values));
}

Eigen::VectorXd sc_interpolate(const ScModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() > 0 && static_cast<std::size_t>(x.cols()) != model.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "sc interpolate: query dimension differs");
  }
  Eigen::VectorXd out(x.rows());
  std::vector<double> row(model.dimension());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = x(i, static_cast<Eigen::Index>(j));
    out[i] = model.interpolate(row);
  }
  return out;
}

std::size_t sc_nodes_for_budget(std::size_t d, std::size_t budget) {
  if (d == 0) throw Error(ErrorCode::invalid_argument, "sc: need at least one dimension");
  std::size_t m = 0;
  while (checked_power(m + 1, d) <= budget) ++m;
  return m;
}

}  // namespace sensakit
