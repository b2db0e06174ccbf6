#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "sensakit/dataset.hpp"
#include "sensakit/optimize.hpp"
#include "sensakit/rng.hpp"

namespace sensakit {

/// Anisotropic squared-exponential kernel plus white noise, on inputs
/// already mapped to the unit cube:
///   k(a, b) = signal_variance * exp(-1/2 sum_j ((a_j - b_j) / l_j)^2)
struct GpHyperparameters {
  std::vector<double> length_scales;
  double signal_variance = 1.0;
  double noise_variance = 0.0;
};

struct GpFitOptions {
  std::size_t restarts = 10;
  /// When false the noise variance stays at `fixed_noise_ratio * var(y)`.
  bool optimize_noise = true;
  double fixed_noise_ratio = 0.0;
  MinimizeOptions optimizer{};
};

/// One multi-start run: where it started and where it ended.
struct GpRestart {
  GpHyperparameters start;
  double start_log_likelihood = 0.0;
  GpHyperparameters result;
  double log_likelihood = 0.0;
};

/// Conditioned GP; immutable, safe for concurrent prediction.
class GpModel {
 public:
  /// Factor the kernel matrix for fixed hyperparameters. `domain` maps
  /// physical inputs to the unit cube; empty means the inputs already live
  /// there. Jitter escalates from 1e-10 to 1e-4 (relative to the signal
  /// variance) until the Cholesky factorisation succeeds.
  static GpModel condition(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<Bounds> domain,
                           const GpHyperparameters& hyper);

  /// Posterior mean at each row of `x` (physical coordinates).
  Eigen::VectorXd predict_mean(const Eigen::MatrixXd& x) const;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(unit_x_.cols()); }
  std::size_t training_size() const noexcept { return static_cast<std::size_t>(unit_x_.rows()); }
  const GpHyperparameters& hyperparameters() const noexcept { return hyper_; }
  double mean_offset() const noexcept { return offset_; }
  double jitter() const noexcept { return jitter_; }
  double log_likelihood() const noexcept { return log_likelihood_; }
  const std::vector<Bounds>& domain() const noexcept { return domain_; }
  /// Multi-start trace filled in by gp_fit; empty for condition().
  const std::vector<GpRestart>& restarts() const noexcept { return restarts_; }

 private:
  friend GpModel gp_fit(const Eigen::MatrixXd&, const Eigen::VectorXd&, const std::vector<Bounds>&,
                        const GpFitOptions&, Rng&);

  Eigen::MatrixXd to_unit(const Eigen::MatrixXd& x) const;

  Eigen::MatrixXd unit_x_;
  Eigen::VectorXd alpha_;
  std::vector<Bounds> domain_;
  GpHyperparameters hyper_;
  double offset_ = 0.0;
  double jitter_ = 0.0;
  double log_likelihood_ = 0.0;
  std::vector<GpRestart> restarts_;
};

/// Log marginal likelihood of centered outputs `y` at unit-cube inputs.
/// With `gradient`, also writes d/d(log theta) for theta =
/// (l_1..l_d, signal_variance, noise_variance). Returns -inf when the
/// kernel matrix cannot be factored even with maximal jitter.
double gp_log_marginal_likelihood(const Eigen::MatrixXd& unit_x, const Eigen::VectorXd& y,
                                  const GpHyperparameters& hyper, Eigen::VectorXd* gradient = nullptr);

/// Maximum-likelihood fit: `restarts` starts drawn log-uniformly
/// (l in [1e-2, 1e1], signal in [1e-2, 1e2] var(y), noise in [1e-8, 1e-1]
/// var(y)), each refined by box-constrained BFGS in log space; the best
/// end point wins.
GpModel gp_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<Bounds>& domain,
               const GpFitOptions& options, Rng& rng);

Eigen::VectorXd gp_predict_mean(const GpModel& model, const Eigen::MatrixXd& x);

/// Training set followed by `extra` with surrogate outputs.
Dataset gp_augment(const GpModel& model, const Dataset& training, const Dataset& extra);

struct CvResult {
  double r2 = 0.0;
  double fraction = 0.0;  // SS_res / SS_tot
  Eigen::VectorXd predictions;
};

/// fraction = SS_res / SS_tot of `predicted` against `truth`.
CvResult cv_scores(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

/// k-fold cross validation with near-equal folds from a seeded shuffle;
/// each fold is refit with `options`. Fold f uses rng.split(f).
CvResult cross_validate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<Bounds>& domain,
                        std::size_t folds, const GpFitOptions& options, Rng& rng);

/// Key-value text dump of the fitted hyperparameters.
void write_model_dump(std::ostream& out, const GpModel& model);

}  // namespace sensakit
