#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "sensakit/dataset.hpp"
#include "sensakit/rng.hpp"

namespace sensakit {

/// Joint law of the model inputs.
///
/// independent_uniform: each coordinate uniform on its bounds.
/// gaussian_copula: Z ~ N(0, correlation), X_j = lower_j + width_j * Phi(Z_j).
/// standard_normal: independent N(0, 1) coordinates, no bounds.
class InputLaw {
 public:
  enum class Kind { independent_uniform, gaussian_copula, standard_normal };

  static InputLaw uniform(std::vector<Bounds> bounds);
  /// Validates symmetry, unit diagonal and positive definiteness.
  static InputLaw copula(const Eigen::MatrixXd& correlation, std::vector<Bounds> bounds);
  static InputLaw standard_normal(std::size_t dimension);

  Kind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<Bounds>& bounds() const noexcept { return bounds_; }
  const Eigen::MatrixXd& correlation() const noexcept { return correlation_; }
  /// Lower Cholesky factor of the correlation (copula only).
  const Eigen::MatrixXd& cholesky() const noexcept { return cholesky_; }

 private:
  Kind kind_ = Kind::independent_uniform;
  std::size_t dimension_ = 0;
  std::vector<Bounds> bounds_;
  Eigen::MatrixXd correlation_;
  Eigen::MatrixXd cholesky_;
};

double normal_cdf(double z);

/// n i.i.d. draws from `law`; the result holds input columns only.
Dataset monte_carlo(const InputLaw& law, std::size_t n, Rng& rng);

/// Stratified design: per dimension exactly one point in each of the n
/// strata [(i-1)/n, i/n), jittered uniformly, strata permuted independently.
/// Only valid for independent uniform inputs.
Dataset latin_hypercube(const InputLaw& law, std::size_t n, Rng& rng);

/// Row-major view helpers between datasets and Eigen matrices.
Eigen::MatrixXd input_matrix(const Dataset& data);
Dataset dataset_from_matrix(const Eigen::MatrixXd& x, const std::vector<Bounds>& bounds, std::string provenance = {});

}  // namespace sensakit
