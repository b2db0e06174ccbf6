#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sensakit {

struct MstResult {
  /// (parent, child) pairs in the order the children joined the tree.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  /// Sum of Euclidean edge lengths.
  double total_length = 0.0;
};

namespace kernels {

// Dense Prim on the complete Euclidean graph of the points (x[i], y[i]),
// grown from point 0. The next vertex is the one with the smallest squared
// distance to the tree, ties going to the smaller index; a vertex's parent
// changes only on a strict improvement. Both variants below implement this
// rule and return identical edges and bit-identical lengths.

namespace serial {
MstResult prim(std::span<const double> x, std::span<const double> y);
}  // namespace serial

namespace parallel {
/// Threads own contiguous slices of the remaining vertices and compact
/// them locally; each step ends with a barrier and an ordered argmin.
MstResult prim(std::span<const double> x, std::span<const double> y);
}  // namespace parallel

}  // namespace kernels
}  // namespace sensakit
