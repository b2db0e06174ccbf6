#include "sensakit/kernels/kde_sums.hpp"

#include <cmath>

#include <omp.h>

#include "sensakit/error.hpp"
#include "sensakit/kernels/simd.hpp"

namespace sensakit::kernels {
namespace {

void check_shapes(const std::vector<std::span<const double>>& xs, std::span<const double> y, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "bandwidth must be positive");
  for (const auto& x : xs) {
    if (x.size() != y.size()) throw Error(ErrorCode::length_mismatch, "kernel sums: column lengths differ");
  }
}

PairSums allocate(std::size_t d, std::size_t n) {
  PairSums s;
  s.x.assign(d, std::vector<double>(n, 0.0));
  s.y.assign(n, 0.0);
  s.joint.assign(d, std::vector<double>(n, 0.0));
  return s;
}

}  // namespace

namespace serial {

PairSums gaussian_pair_sums(const std::vector<std::span<const double>>& xs, std::span<const double> y, double h) {
  check_shapes(xs, y, h);
  const std::size_t n = y.size();
  const double c = -0.5 / (h * h);
  PairSums s = allocate(xs.size(), n);
  std::vector<double> wy(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dy = y[j] - y[i];
      wy[j] = std::exp(c * dy * dy);
      sy += wy[j];
    }
    s.y[i] = sy;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      double sx = 0.0;
      double sxy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double dx = xs[k][j] - xs[k][i];
        const double wx = std::exp(c * dx * dx);
        sx += wx;
        sxy += wx * wy[j];
      }
      s.x[k][i] = sx;
      s.joint[k][i] = sxy;
    }
  }
  return s;
}

}  // namespace serial

namespace parallel {

PairSums gaussian_pair_sums(const std::vector<std::span<const double>>& xs, std::span<const double> y, double h) {
  using namespace simd;
  check_shapes(xs, y, h);
  const std::size_t n = y.size();
  const std::size_t d = xs.size();
  const double c = -0.5 / (h * h);
  const vd vc = broadcast(c);
  PairSums s = allocate(d, n);
  const std::size_t blocked = n - n % kLanes;
  const auto rows = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel
  {
    std::vector<double> wy(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const vd yi = broadcast(y[i]);
      vd acc_y = broadcast(0.0);
      for (std::size_t j = 0; j < blocked; j += kLanes) {
        const vd dy = load(&y[j]) - yi;
        const vd w = exp_nonpositive(vc * dy * dy);
        store(&wy[j], w);
        acc_y += w;
      }
      double sy = horizontal_sum(acc_y);
      for (std::size_t j = blocked; j < n; ++j) {
        const double dy = y[j] - y[i];
        const double w = exp_nonpositive(broadcast(c * dy * dy))[0];
        wy[j] = w;
        sy += w;
      }
      s.y[i] = sy;

      for (std::size_t k = 0; k < d; ++k) {
        const double* xk = xs[k].data();
        const vd xi = broadcast(xk[i]);
        vd acc_x = broadcast(0.0);
        vd acc_xy = broadcast(0.0);
        for (std::size_t j = 0; j < blocked; j += kLanes) {
          const vd dx = load(&xk[j]) - xi;
          const vd w = exp_nonpositive(vc * dx * dx);
          acc_x += w;
          acc_xy += w * load(&wy[j]);
        }
        double sx = horizontal_sum(acc_x);
        double sxy = horizontal_sum(acc_xy);
        for (std::size_t j = blocked; j < n; ++j) {
          const double dx = xk[j] - xk[i];
          const double w = exp_nonpositive(broadcast(c * dx * dx))[0];
          sx += w;
          sxy += w * wy[j];
        }
        s.x[k][i] = sx;
        s.joint[k][i] = sxy;
      }
    }
  }
  return s;
}

}  // namespace parallel

std::vector<double> gaussian_sums_1d(std::span<const double> samples, std::span<const double> queries, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "bandwidth must be positive");
  const double c = -0.5 / (h * h);
  std::vector<double> out(queries.size());
  const auto m = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < m; ++q) {
    double s = 0.0;
    for (double v : samples) {
      const double d = queries[static_cast<std::size_t>(q)] - v;
      s += std::exp(c * d * d);
    }
    out[static_cast<std::size_t>(q)] = s;
  }
  return out;
}

std::vector<double> gaussian_sums_2d(std::span<const double> sx, std::span<const double> sy,
                                     std::span<const double> qx, std::span<const double> qy, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "bandwidth must be positive");
  if (sx.size() != sy.size() || qx.size() != qy.size()) {
    throw Error(ErrorCode::length_mismatch, "joint kernel sums: coordinate lengths differ");
  }
  const double c = -0.5 / (h * h);
  std::vector<double> out(qx.size());
  const auto m = static_cast<std::ptrdiff_t>(qx.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t qq = 0; qq < m; ++qq) {
    const auto q = static_cast<std::size_t>(qq);
    double s = 0.0;
    for (std::size_t j = 0; j < sx.size(); ++j) {
      const double dx = qx[q] - sx[j];
      const double dy = qy[q] - sy[j];
      s += std::exp(c * dx * dx) * std::exp(c * dy * dy);
    }
    out[q] = s;
  }
  return out;
}

}  // namespace sensakit::kernels
