#include "sensakit/testbed.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sensakit/error.hpp"

namespace sensakit {

double ishigami_eval(double x, double y, double z, double a, double b) {
  const double sy = std::sin(y);
  const double z2 = z * z;
  return (1.0 + b * z2 * z2) * std::sin(x) + a * sy * sy;
}

double piston_eval(double M, double S, double V0, double k, double P0, double Ta, double T0) {
  const double gas = P0 * V0 / T0;
  const double A = P0 * S + 19.62 * M - k * V0 / S;
  const double disc = A * A + 4.0 * k * gas * Ta;
  if (!(disc > 0.0)) throw Error(ErrorCode::domain_error, "piston: nonpositive discriminant");
  const double V = S / (2.0 * k) * (std::sqrt(disc) - A);
  if (!(V > 0.0)) throw Error(ErrorCode::domain_error, "piston: nonpositive gas volume");
  return 2.0 * std::numbers::pi * std::sqrt(M / (k + S * S * gas * Ta / (V * V)));
}

const std::vector<Bounds>& piston_ranges() {
  static const std::vector<Bounds> ranges{
      {30.0, 60.0}, {0.005, 0.020}, {0.002, 0.010}, {1000.0, 5000.0},
      {90000.0, 110000.0}, {290.0, 296.0}, {340.0, 360.0},
  };
  return ranges;
}

double analytic_hellinger_bivariate_normal(double rho) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::domain_error, "bivariate normal: need |rho| < 1");
  const double r2 = rho * rho;
  return 2.0 - 2.0 * std::pow(1.0 - r2, 0.25) / std::sqrt(1.0 - r2 / 4.0);
}

TestFunction TestFunction::random_output() {
  TestFunction f;
  f.kind_ = Kind::random_output;
  f.bounds_ = {{0.0, 1.0}};
  return f;
}

TestFunction TestFunction::bivariate_normal(double rho) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::domain_error, "bivariate normal: need |rho| < 1");
  TestFunction f;
  f.kind_ = Kind::bivariate_normal;
  f.rho_ = rho;
  f.bounds_ = {{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}};
  return f;
}

TestFunction TestFunction::ishigami(double a, double b) {
  TestFunction f;
  f.kind_ = Kind::ishigami;
  f.a_ = a;
  f.b_ = b;
  f.bounds_.assign(3, Bounds{-std::numbers::pi, std::numbers::pi});
  return f;
}

TestFunction TestFunction::piston() {
  TestFunction f;
  f.kind_ = Kind::piston;
  f.bounds_.assign(7, Bounds{0.0, 1.0});
  return f;
}

TestFunction TestFunction::from_name(std::string_view name, std::span<const double> params) {
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi) {
      throw Error(ErrorCode::invalid_argument, "test function '" + std::string(name) + "' takes " +
                                                   std::to_string(lo) + " to " + std::to_string(hi) +
                                                   " parameters");
    }
  };
  if (name == "random") {
    arity(0, 0);
    return random_output();
  }
  if (name == "binormal") {
    arity(1, 1);
    return bivariate_normal(params[0]);
  }
  if (name == "ishigami") {
    arity(0, 2);
    return ishigami(params.size() > 0 ? params[0] : 7.0, params.size() > 1 ? params[1] : 0.1);
  }
  if (name == "piston") {
    arity(0, 0);
    return piston();
  }
  throw Error(ErrorCode::invalid_argument, "unknown test function '" + std::string(name) + "'");
}

std::string TestFunction::name() const {
  switch (kind_) {
    case Kind::random_output: return "random";
    case Kind::bivariate_normal: return "binormal";
    case Kind::ishigami: return "ishigami";
    case Kind::piston: return "piston";
  }
  return "unknown";
}

double TestFunction::evaluate(std::span<const double> x) const {
  if (x.size() != dimension()) throw Error(ErrorCode::dimension_mismatch, name() + ": wrong input dimension");
  switch (kind_) {
    case Kind::ishigami: return ishigami_eval(x[0], x[1], x[2], a_, b_);
    case Kind::piston: {
      const auto& r = piston_ranges();
      double p[7];
      for (std::size_t j = 0; j < 7; ++j) p[j] = r[j].lower + r[j].width() * x[j];
      return piston_eval(p[0], p[1], p[2], p[3], p[4], p[5], p[6]);
    }
    default: throw Error(ErrorCode::invalid_argument, name() + " has no deterministic evaluator");
  }
}

std::vector<double> TestFunction::outputs(const Dataset& inputs, Rng& rng) const {
  if (inputs.input_count() != dimension()) {
    throw Error(ErrorCode::dimension_mismatch, name() + ": dataset has the wrong number of inputs");
  }
  const std::size_t n = inputs.size();
  std::vector<double> y(n);
  if (kind_ == Kind::random_output) {
    for (auto& v : y) v = rng.uniform();
  } else if (kind_ == Kind::bivariate_normal) {
    const auto x = inputs.input(0);
    const double s = std::sqrt(1.0 - rho_ * rho_);
    for (std::size_t i = 0; i < n; ++i) y[i] = rho_ * x[i] + s * rng.normal();
  } else {
    std::vector<double> row(dimension());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = inputs.input(j)[i];
      y[i] = evaluate(row);
    }
  }
  return y;
}

InputLaw TestFunction::default_law() const {
  if (kind_ == Kind::bivariate_normal) return InputLaw::standard_normal(1);
  return InputLaw::uniform(bounds_);
}

Dataset make_inputs(const TestFunction& fn, const InputLaw& law, std::size_t n, Rng& rng) {
  if (law.dimension() != fn.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, fn.name() + ": law dimension " + std::to_string(law.dimension()) +
                                                   " differs from " + std::to_string(fn.dimension()));
  }
  Dataset x = monte_carlo(law, n, rng);
  return x.with_output(fn.outputs(x, rng));
}

}  // namespace sensakit
