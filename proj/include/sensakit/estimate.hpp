#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace sensakit {

enum class Method { sample_kde, sample_mst, gp_kde, gp_mst, sc_kde, direct_kde, direct_mst };

std::string_view to_string(Method m) noexcept;
std::optional<Method> method_from_string(std::string_view s) noexcept;
bool uses_mst(Method m) noexcept;

/// One sensitivity-index value and how it was obtained. Values are never
/// clipped; small negative estimates are legitimate.
struct SiEstimate {
  std::size_t variable_index = 1;  // 1-based
  Method method = Method::sample_kde;
  double value = 0.0;
  std::size_t L = 0;  // expensive model evaluations behind the estimate
  std::size_t N = 0;  // samples the estimator saw
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

}  // namespace sensakit
