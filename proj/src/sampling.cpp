#include "sensakit/sampling.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Cholesky>

#include "sensakit/error.hpp"

namespace sensakit {
namespace {

void check_bounds(const std::vector<Bounds>& bounds) {
  if (bounds.empty()) throw Error(ErrorCode::invalid_argument, "input law needs at least one dimension");
  for (const auto& b : bounds) {
    if (!(b.lower < b.upper)) throw Error(ErrorCode::invalid_argument, "input bounds require lower < upper");
  }
}

std::vector<std::optional<Bounds>> optional_bounds(const InputLaw& law) {
  std::vector<std::optional<Bounds>> out;
  for (const auto& b : law.bounds()) out.emplace_back(b);
  return out;
}

}  // namespace

InputLaw InputLaw::uniform(std::vector<Bounds> bounds) {
  check_bounds(bounds);
  InputLaw law;
  law.kind_ = Kind::independent_uniform;
  law.dimension_ = bounds.size();
  law.bounds_ = std::move(bounds);
  return law;
}

InputLaw InputLaw::copula(const Eigen::MatrixXd& correlation, std::vector<Bounds> bounds) {
  check_bounds(bounds);
  const auto d = static_cast<Eigen::Index>(bounds.size());
  if (correlation.rows() != d || correlation.cols() != d) {
    throw Error(ErrorCode::dimension_mismatch, "correlation matrix does not match the number of bounds");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (correlation(i, i) != 1.0) throw Error(ErrorCode::invalid_argument, "correlation diagonal must be 1");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (correlation(i, j) != correlation(j, i)) {
        throw Error(ErrorCode::invalid_argument, "correlation matrix must be symmetric");
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(correlation);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::not_positive_definite, "correlation matrix is not positive definite");
  }
  InputLaw law;
  law.kind_ = Kind::gaussian_copula;
  law.dimension_ = bounds.size();
  law.bounds_ = std::move(bounds);
  law.correlation_ = correlation;
  law.cholesky_ = llt.matrixL();
  return law;
}

InputLaw InputLaw::standard_normal(std::size_t dimension) {
  if (dimension == 0) throw Error(ErrorCode::invalid_argument, "input law needs at least one dimension");
  InputLaw law;
  law.kind_ = Kind::standard_normal;
  law.dimension_ = dimension;
  return law;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

Dataset monte_carlo(const InputLaw& law, std::size_t n, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "monte_carlo needs n >= 1");
  const std::size_t d = law.dimension();
  std::vector<std::vector<double>> cols(d, std::vector<double>(n));
  switch (law.kind()) {
    case InputLaw::Kind::independent_uniform:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) cols[k][i] = rng.uniform(law.bounds()[k].lower, law.bounds()[k].upper);
      }
      break;
    case InputLaw::Kind::standard_normal:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) cols[k][i] = rng.normal();
      }
      break;
    case InputLaw::Kind::gaussian_copula: {
      const Eigen::MatrixXd& chol = law.cholesky();
      Eigen::VectorXd z(static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) z[static_cast<Eigen::Index>(k)] = rng.normal();
        const Eigen::VectorXd correlated = chol.triangularView<Eigen::Lower>() * z;
        for (std::size_t k = 0; k < d; ++k) {
          const Bounds& b = law.bounds()[k];
          cols[k][i] = b.lower + b.width() * normal_cdf(correlated[static_cast<Eigen::Index>(k)]);
        }
      }
      break;
    }
  }
  return make_input_dataset(std::move(cols), optional_bounds(law), "monte_carlo");
}

Dataset latin_hypercube(const InputLaw& law, std::size_t n, Rng& rng) {
  if (law.kind() != InputLaw::Kind::independent_uniform) {
    throw Error(ErrorCode::unsupported_design, "Latin hypercube sampling requires independent uniform inputs");
  }
  if (n == 0) throw Error(ErrorCode::invalid_argument, "latin_hypercube needs n >= 1");
  const std::size_t d = law.dimension();
  std::vector<std::vector<double>> cols(d, std::vector<double>(n));
  std::vector<std::size_t> strata(n);
  for (std::size_t k = 0; k < d; ++k) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(strata));
    const Bounds& b = law.bounds()[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(n);
      cols[k][i] = b.lower + b.width() * u;
    }
  }
  return make_input_dataset(std::move(cols), optional_bounds(law), "latin_hypercube");
}

Eigen::MatrixXd input_matrix(const Dataset& data) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.input_count()));
  for (std::size_t k = 0; k < data.input_count(); ++k) {
    const auto col = data.input(k);
    for (std::size_t i = 0; i < col.size(); ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = col[i];
  }
  return x;
}

Dataset dataset_from_matrix(const Eigen::MatrixXd& x, const std::vector<Bounds>& bounds, std::string provenance) {
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    cols[static_cast<std::size_t>(k)].assign(x.col(k).data(), x.col(k).data() + x.rows());
  }
  std::vector<std::optional<Bounds>> ob;
  for (const auto& b : bounds) ob.emplace_back(b);
  return make_input_dataset(std::move(cols), ob, std::move(provenance));
}

}  // namespace sensakit
