#pragma once

// Eight-lane double vectors via the GCC/Clang vector extension. The lane
// count is fixed (independent of -march; narrower targets split each
// operation), so reductions built on these types have the same summation
// order in every build.

#include <cstddef>
#include <cstdint>
#include <cstring>

#if !defined(__GNUC__)
#error "sensakit kernels require the GCC/Clang vector extension"
#endif

namespace sensakit::kernels::simd {

inline constexpr std::size_t kLanes = 8;

using vd = double __attribute__((vector_size(64)));
using vl = std::int64_t __attribute__((vector_size(64)));
using vu = std::uint64_t __attribute__((vector_size(64)));

inline vd load(const double* p) {
  vd v;
  std::memcpy(&v, p, sizeof v);
  return v;
}
inline vl load(const std::int64_t* p) {
  vl v;
  std::memcpy(&v, p, sizeof v);
  return v;
}
inline void store(double* p, vd v) { std::memcpy(p, &v, sizeof v); }
inline void store(std::int64_t* p, vl v) { std::memcpy(p, &v, sizeof v); }

inline vd broadcast(double x) { return vd{x, x, x, x, x, x, x, x}; }
inline vl broadcast(std::int64_t x) { return vl{x, x, x, x, x, x, x, x}; }
inline vl iota() { return vl{0, 1, 2, 3, 4, 5, 6, 7}; }

inline double horizontal_sum(vd v) { return ((v[0] + v[1]) + (v[2] + v[3])) + ((v[4] + v[5]) + (v[6] + v[7])); }

/// exp(x) for x <= 0, clamped below at exp(-350). Products of two results
/// therefore never fall into the subnormal range. Relative error < 1e-15.
inline vd exp_nonpositive(vd x) {
  const vd floor = broadcast(-350.0);
  x = x < floor ? floor : x;
  constexpr double log2e = 1.4426950408889634;
  constexpr double shifter = 6755399441055744.0;  // 1.5 * 2^52
  constexpr double ln2_hi = 6.93147180369123816490e-01;
  constexpr double ln2_lo = 1.90821492927058770002e-10;
  // t carries round(x * log2e) in its low mantissa bits.
  const vd t = x * log2e + shifter;
  const vd k = t - shifter;
  const vd r = (x - k * ln2_hi) - k * ln2_lo;  // |r| <= ln2 / 2
  // Taylor coefficients 1/k!, k = 0..11, combined by Estrin's scheme to
  // keep the dependency chain short.
  const vd r2 = r * r;
  const vd r4 = r2 * r2;
  const vd r8 = r4 * r4;
  const vd q0 = 1.0 + r;
  const vd q1 = 1.0 / 2.0 + r * (1.0 / 6.0);
  const vd q2 = 1.0 / 24.0 + r * (1.0 / 120.0);
  const vd q3 = 1.0 / 720.0 + r * (1.0 / 5040.0);
  const vd q4 = 1.0 / 40320.0 + r * (1.0 / 362880.0);
  const vd q5 = 1.0 / 3628800.0 + r * (1.0 / 39916800.0);
  const vd s0 = q0 + q1 * r2;
  const vd s1 = q2 + q3 * r2;
  const vd s2 = q4 + q5 * r2;
  const vd p = (s0 + s1 * r4) + s2 * r8;
  // Vector casts between equal-sized vector types reinterpret the bits.
  const vu scale = ((vu)t + 1023u) << 52;
  return p * (vd)scale;
}

}  // namespace sensakit::kernels::simd
