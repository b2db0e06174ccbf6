#include <doctest.h>

#include <cmath>
#include <vector>

#include "sensakit/collocation.hpp"
#include "sensakit/rng.hpp"
#include "test_util.hpp"

using namespace sensakit;
using sensakit::testing::code_of;

TEST_SUITE("collocation") {

TEST_CASE("gauss-legendre nodes for small m") {
  CHECK(gauss_legendre_nodes(1) == std::vector<double>{0.0});
  const auto two = gauss_legendre_nodes(2);
  CHECK(std::abs(two[0] + 1.0 / std::sqrt(3.0)) < 1e-12);
  CHECK(std::abs(two[1] - 1.0 / std::sqrt(3.0)) < 1e-12);
  const auto three = gauss_legendre_nodes(3);
  CHECK(std::abs(three[0] + std::sqrt(0.6)) < 1e-12);
  CHECK(three[1] == 0.0);
  CHECK(std::abs(three[2] - std::sqrt(0.6)) < 1e-12);
  // Roots of P_4: sqrt(3/7 -+ 2/7 sqrt(6/5)).
  const auto four = gauss_legendre_nodes(4);
  CHECK(std::abs(four[2] - std::sqrt(3.0 / 7 - 2.0 / 7 * std::sqrt(1.2))) < 1e-12);
  CHECK(std::abs(four[3] - std::sqrt(3.0 / 7 + 2.0 / 7 * std::sqrt(1.2))) < 1e-12);
}

TEST_CASE("gauss-legendre nodes are symmetric and sorted") {
  for (std::size_t m = 1; m <= 40; ++m) {
    const auto x = gauss_legendre_nodes(m);
    REQUIRE(x.size() == m);
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(std::abs(x[i] + x[m - 1 - i]) < 1e-12);
      if (i) CHECK(x[i] > x[i - 1]);
    }
  }
  const ScModel mapped({{2.0, 6.0}}, 5, std::vector<double>(5, 0.0));
  const auto& n = mapped.nodes(0);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs((n[i] - 4.0) + (n[4 - i] - 4.0)) < 1e-12);
}

TEST_CASE("interpolation is exact at grid nodes") {
  const std::vector<Bounds> b{{-1, 2}, {0, 5}};
  const auto model = sc_build(b, 4, [](std::span<const double> x) { return std::exp(x[0]) * std::cos(x[1]); });
  for (std::size_t f = 0; f < 16; ++f) {
    const auto p = model.grid_point(f);
    CHECK(std::abs(model.interpolate(p) - model.values()[f]) <= 1e-12 * std::max(1.0, std::abs(model.values()[f])));
  }
  // First dimension varies fastest.
  CHECK(model.grid_point(1)[0] == model.nodes(0)[1]);
  CHECK(model.grid_point(1)[1] == model.nodes(1)[0]);
  CHECK(model.grid_point(4)[1] == model.nodes(1)[1]);
}

TEST_CASE("interpolation reproduces tensor polynomials") {
  Rng rng(1);
  SUBCASE("linear, m = 2") {
    const std::vector<Bounds> b{{0, 1}, {-3, 3}, {10, 11}};
    auto f = [](std::span<const double> x) { return 1.5 - 2 * x[0] + 0.25 * x[1] + x[2] + x[0] * x[1] * x[2]; };
    const auto model = sc_build(b, 2, f);
    for (int t = 0; t < 100; ++t) {
      const std::vector<double> q{rng.uniform(0, 1), rng.uniform(-3, 3), rng.uniform(10, 11)};
      CHECK(std::abs(model.interpolate(q) - f(q)) < 1e-10 * std::max(1.0, std::abs(f(q))));
    }
  }
  SUBCASE("quadratic, m = 3, d = 1") {
    auto f = [](std::span<const double> x) { return 3 * x[0] * x[0] - x[0] + 2; };
    const auto model = sc_build({{-2, 5}}, 3, f);
    for (int t = 0; t < 100; ++t) {
      const std::vector<double> q{rng.uniform(-2, 5)};
      CHECK(std::abs(model.interpolate(q) - f(q)) < 1e-10 * std::max(1.0, std::abs(f(q))));
    }
  }
  SUBCASE("degree m - 1 per dimension") {
    for (std::size_t m = 1; m <= 6; ++m) {
      const std::vector<Bounds> b{{-1, 1}, {0, 2}};
      auto f = [m](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) s += (1.0 + i + 2.0 * j) * std::pow(x[0], i) * std::pow(x[1], j);
        return s;
      };
      const auto model = sc_build(b, m, f);
      for (int t = 0; t < 50; ++t) {
        const std::vector<double> q{rng.uniform(-1, 1), rng.uniform(0, 2)};
        CHECK(std::abs(model.interpolate(q) - f(q)) < 1e-9 * std::max(1.0, std::abs(f(q))));
      }
    }
  }
}

TEST_CASE("sc_build evaluates exactly m^d times and honours the budget") {
  std::size_t calls = 0;
  auto f = [&](std::span<const double> x) {
    ++calls;
    return x[0];
  };
  const std::vector<Bounds> seven(7, Bounds{0, 1});
  const auto model = sc_build(seven, 2, f, 128);
  CHECK(calls == 128);
  CHECK(model.values().size() == 128);
  calls = 0;
  CHECK(code_of([&] { sc_build(seven, 3, f, 1000); }) == ErrorCode::budget_exceeded);
  CHECK(calls == 0);
  CHECK(sc_nodes_for_budget(7, 1000) == 2);
  CHECK(sc_nodes_for_budget(3, 1000) == 10);
  CHECK(sc_nodes_for_budget(3, 999) == 9);
  CHECK(sc_nodes_for_budget(2, 0) == 0);
}

TEST_CASE("sc model checks sizes") {
  CHECK(code_of([] { ScModel m({{0, 1}, {0, 1}}, 3, std::vector<double>(8, 0.0)); }) == ErrorCode::length_mismatch);
  const ScModel m({{0, 1}, {0, 1}}, 2, std::vector<double>(4, 0.0));
  const std::vector<double> q{0.5};
  CHECK(code_of([&] { (void)m.interpolate(q); }) == ErrorCode::dimension_mismatch);
  CHECK(sc_interpolate(m, Eigen::MatrixXd::Constant(3, 2, 0.3)).size() == 3);
}

}
