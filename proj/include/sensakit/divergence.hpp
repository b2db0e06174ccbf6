#pragma once

#include <string_view>

namespace sensakit {

enum class Divergence { hellinger, kullback_leibler };

std::string_view to_string(Divergence d) noexcept;

/// Convex generator f with f(1) = 0:
///   hellinger: (sqrt(t) - 1)^2, t >= 0
///   kullback_leibler: -log(t), t > 0
/// Throws ErrorCode::domain_error outside those domains.
double f_eval(Divergence div, double t);

}  // namespace sensakit
