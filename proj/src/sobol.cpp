#include "sensakit/sobol.hpp"

#include <bit>
#include <string>

#include "sensakit/error.hpp"

namespace sensakit {
namespace {

struct Primitive {
  int degree;
  std::uint32_t coefficients;
  std::array<std::uint32_t, 7> initial;
};

// new-joe-kuo-6.21201, dimensions 2..21. Dimension 1 is the van der Corput
// sequence and has no entry.
constexpr std::array<Primitive, SobolSequence::max_dimension - 1> kPrimitives{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
}};

}  // namespace

SobolSequence::SobolSequence(std::size_t dimension) : dimension_(dimension), state_(dimension, 0u) {
  if (dimension == 0 || dimension > max_dimension) {
    throw Error(ErrorCode::dimension_mismatch,
                "Sobol dimension " + std::to_string(dimension) + " outside 1.." + std::to_string(max_dimension));
  }
  directions_.resize(dimension);
  // v[i] is stored 0-based: directions_[d][i] holds direction number i + 1.
  for (int i = 0; i < bits; ++i) directions_[0][i] = 1u << (bits - 1 - i);
  for (std::size_t d = 1; d < dimension; ++d) {
    const Primitive& p = kPrimitives[d - 1];
    auto& v = directions_[d];
    const int s = p.degree;
    for (int i = 0; i < s; ++i) v[i] = p.initial[i] << (bits - 1 - i);
    for (int i = s; i < bits; ++i) {
      std::uint32_t x = v[i - s] ^ (v[i - s] >> s);
      for (int k = 1; k < s; ++k) {
        if ((p.coefficients >> (s - 1 - k)) & 1u) x ^= v[i - k];
      }
      v[i] = x;
    }
  }
}

void SobolSequence::next(std::span<double> out) {
  if (out.size() != dimension_) throw Error(ErrorCode::dimension_mismatch, "Sobol output size");
  if (index_ + 1 >= (std::uint64_t{1} << bits)) throw Error(ErrorCode::invalid_argument, "Sobol sequence exhausted");
  // Gray-code update from point `index_` to `index_ + 1` flips the
  // direction number at the lowest zero bit of index_.
  const int c = std::countr_one(index_);
  ++index_;
  for (std::size_t d = 0; d < dimension_; ++d) {
    state_[d] ^= directions_[d][c];
    out[d] = static_cast<double>(state_[d]) * 0x1.0p-32;
  }
}

std::vector<double> SobolSequence::next() {
  std::vector<double> p(dimension_);
  next(p);
  return p;
}

Eigen::MatrixXd sobol_points(SobolSequence& seq, std::size_t n) {
  if (n > (std::size_t{1} << 31)) throw Error(ErrorCode::invalid_argument, "at most 2^31 Sobol points");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(seq.dimension()));
  std::vector<double> row(seq.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    seq.next(row);
    for (std::size_t d = 0; d < row.size(); ++d) pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = row[d];
  }
  return pts;
}

}  // namespace sensakit
