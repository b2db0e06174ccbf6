#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sensakit/dataset.hpp"
#include "sensakit/rng.hpp"
#include "sensakit/sampling.hpp"

namespace sensakit {

/// G(x, y, z | a, b) = (1 + b z^4) sin(x) + a sin^2(y).
double ishigami_eval(double x, double y, double z, double a = 7.0, double b = 0.1);

/// Piston cycle time in seconds. The gas term uses P0 V0 / T0 with V0 the
/// initial gas volume:
///   A = P0 S + 19.62 M - k V0 / S
///   V = S / (2k) (sqrt(A^2 + 4 k (P0 V0 / T0) Ta) - A)
///   C = 2 pi sqrt(M / (k + S^2 (P0 V0 / T0) Ta / V^2))
double piston_eval(double M, double S, double V0, double k, double P0, double Ta, double T0);

/// Physical input ranges (M, S, V0, k, P0, Ta, T0).
const std::vector<Bounds>& piston_ranges();

/// Hellinger index of Y against X for a standard bivariate normal pair
/// with correlation rho: 2 - 2 (1 - rho^2)^(1/4) / (1 - rho^2 / 4)^(1/2).
double analytic_hellinger_bivariate_normal(double rho);

/// Named test problems. Design coordinates are what datasets store; the
/// piston is designed on the unit cube and mapped to its physical ranges
/// only inside evaluate().
class TestFunction {
 public:
  enum class Kind { random_output, bivariate_normal, ishigami, piston };

  static TestFunction random_output();
  static TestFunction bivariate_normal(double rho);
  static TestFunction ishigami(double a = 7.0, double b = 0.1);
  static TestFunction piston();
  /// "random", "binormal" (params: rho), "ishigami" (params: a, b), "piston".
  static TestFunction from_name(std::string_view name, std::span<const double> params = {});

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  std::size_t dimension() const noexcept { return bounds_.size(); }
  /// Design-coordinate bounds; infinite for normally distributed inputs.
  const std::vector<Bounds>& bounds() const noexcept { return bounds_; }
  double rho() const noexcept { return rho_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  /// True when the output is a function of the inputs alone.
  bool deterministic() const noexcept { return kind_ == Kind::ishigami || kind_ == Kind::piston; }
  /// Output at one design point; deterministic kinds only.
  double evaluate(std::span<const double> x) const;
  /// Outputs for every row of `inputs`. Stochastic kinds draw their noise
  /// from `rng` row by row.
  std::vector<double> outputs(const Dataset& inputs, Rng& rng) const;

  /// Independent law on the design domain.
  InputLaw default_law() const;

 private:
  Kind kind_ = Kind::ishigami;
  std::vector<Bounds> bounds_;
  double rho_ = 0.0;
  double a_ = 7.0;
  double b_ = 0.1;
};

/// n inputs drawn from `law` plus the function's outputs.
Dataset make_inputs(const TestFunction& fn, const InputLaw& law, std::size_t n, Rng& rng);

}  // namespace sensakit
