#include "sensakit/divergence.hpp"

#include <cmath>
#include <string>

#include "sensakit/error.hpp"
#include "sensakit/estimate.hpp"

namespace sensakit {

std::string_view to_string(Divergence d) noexcept {
  return d == Divergence::hellinger ? "hellinger" : "kl";
}

double f_eval(Divergence div, double t) {
  switch (div) {
    case Divergence::hellinger: {
      if (!(t >= 0.0)) throw Error(ErrorCode::domain_error, "hellinger generator needs t >= 0, got " + std::to_string(t));
      const double s = std::sqrt(t) - 1.0;
      return s * s;
    }
    case Divergence::kullback_leibler:
      if (!(t > 0.0)) throw Error(ErrorCode::domain_error, "KL generator needs t > 0, got " + std::to_string(t));
      return -std::log(t);
  }
  return 0.0;
}

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::sample_kde: return "sample-kde";
    case Method::sample_mst: return "sample-mst";
    case Method::gp_kde: return "gp-kde";
    case Method::gp_mst: return "gp-mst";
    case Method::sc_kde: return "sc-kde";
    case Method::direct_kde: return "direct-kde";
    case Method::direct_mst: return "direct-mst";
  }
  return "unknown";
}

std::optional<Method> method_from_string(std::string_view s) noexcept {
  for (Method m : {Method::sample_kde, Method::sample_mst, Method::gp_kde, Method::gp_mst, Method::sc_kde,
                   Method::direct_kde, Method::direct_mst}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

bool uses_mst(Method m) noexcept {
  return m == Method::sample_mst || m == Method::gp_mst || m == Method::direct_mst;
}

}  // namespace sensakit
