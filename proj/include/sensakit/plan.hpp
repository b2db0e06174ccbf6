#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sensakit/estimate.hpp"
#include "sensakit/sampling.hpp"
#include "sensakit/testbed.hpp"

namespace sensakit {

/// Declarative description of one experiment.
///
/// Text form is one `key = value` per line, `#` starts a comment:
///
///   function = ishigami(7, 0.1)       # random | binormal(rho, ...) | ishigami(a, b) | piston
///   law      = copula                 # uniform | copula | normal
///   sigma    = 1, 0.8, 0.5; 0.8, 1, 0.8; 0.5, 0.8, 1
///   N        = 1000
///   N_ref    = 100000
///   L_grid   = 30, 50, 100, 200
///   n_r      = 10
///   methods  = sample-kde, gp-mst
///   seed     = 42
///
/// binormal accepts several correlations; each becomes its own variable.
struct ExperimentPlan {
  std::string name;
  std::string function = "ishigami";
  std::vector<double> function_params;
  std::string law = "uniform";
  Eigen::MatrixXd sigma;
  std::size_t N = 1000;
  std::size_t N_ref = 100000;
  std::vector<std::size_t> L_grid;
  std::size_t n_r = 10;
  std::vector<Method> methods;
  std::uint64_t seed = 0;

  bool has(Method m) const;
  /// One test function per variable group (several for binormal).
  std::vector<TestFunction> cases() const;
  InputLaw input_law(const TestFunction& fn) const;
};

/// Throws parse_error on malformed lines, unknown or repeated keys, and
/// invalid_argument when validate() rejects the result.
ExperimentPlan parse_plan(std::istream& in, const std::string& origin = "<plan>");
/// missing_file when `path` cannot be opened. The plan name is the stem.
ExperimentPlan parse_plan_file(const std::filesystem::path& path);

/// max(L_grid) <= N, n_r >= 1, non-empty methods and grid, law matching
/// the function.
void validate(const ExperimentPlan& plan);

}  // namespace sensakit
