#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sensakit/cli.hpp"
#include "sensakit/rng.hpp"
#include "sensakit/sampling.hpp"
#include "sensakit/testbed.hpp"

using namespace sensakit;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch() {
  static const auto dir = [] {
    auto d = std::filesystem::temp_directory_path() / "sensakit_test_cli";
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

template <typename F>
std::string write_csv(const std::string& name, std::size_t n, std::size_t d, F&& row) {
  const auto path = scratch() / name;
  std::ofstream f(path);
  for (std::size_t k = 0; k < d; ++k) f << "x" << k + 1 << ',';
  f << "y\n";
  f.precision(17);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> v = row(i);
    for (std::size_t k = 0; k < v.size(); ++k) f << (k ? "," : "") << v[k];
    f << '\n';
  }
  return path.string();
}

// Value column of the last data row of a CSV printed by `si`.
double last_value(const std::string& out) {
  std::istringstream in(out);
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  std::vector<std::string> cells;
  std::stringstream ss(last);
  std::string c;
  while (std::getline(ss, c, ',')) cells.push_back(c);
  return std::stod(cells.at(4));
}

std::string value_of(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + " = ");
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size() + 3;
  return out.substr(start, out.find('\n', start) - start);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 1") {
  const auto data = write_csv("small.csv", 20, 1, [](std::size_t i) {
    return std::vector<double>{double(i), std::sin(double(i))};
  });
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"si"}).code == 1);
  CHECK(cli({"si", "--data", "/nonexistent.csv"}).code == 1);
  CHECK(cli({"si", "--data", data, "--bogus"}).code == 1);
  CHECK(cli({"si", "--data", data, "--method", "mst", "--divergence", "kl"}).code == 1);
  CHECK(cli({"si", "--data", data, "--method", "svm"}).code == 1);
  CHECK(cli({"si", "--data", data, "--variable", "7"}).code == 1);
  CHECK(cli({"si", "--data", data, "--variable", "abc"}).code == 1);
  CHECK(cli({"si", "--data", data, "--output", "nope"}).code == 1);
  CHECK(cli({"beta", "--n", "1"}).code == 1);
  CHECK(cli({"beta", "--n", "ten"}).code == 1);
  CHECK(cli({"beta"}).code == 1);
  CHECK(cli({"surrogate", "--data", data, "--folds", "1"}).code == 1);
  CHECK(cli({"experiment", "--plan", "/nonexistent.plan"}).code == 1);
  CHECK(cli({"experiment"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--version"}).code == 0);
}

TEST_CASE("runtime errors exit with 2") {
  const auto constant_x = write_csv("constx.csv", 20, 1, [](std::size_t i) {
    return std::vector<double>{1.0, double(i)};
  });
  CHECK(cli({"si", "--data", constant_x, "--method", "kde"}).code == 2);
  const auto short_data = write_csv("short.csv", 5, 1, [](std::size_t i) {
    return std::vector<double>{double(i), double(i * i)};
  });
  CHECK(cli({"si", "--data", short_data, "--method", "kde"}).code == 2);
  const auto ragged = scratch() / "ragged.csv";
  std::ofstream(ragged) << "x1,y\n1,2\n3\n";
  CHECK(cli({"si", "--data", ragged.string()}).code == 2);
  const auto text = scratch() / "text.csv";
  std::ofstream(text) << "x1,y\n1,NaN\n2,3\n";
  CHECK(cli({"si", "--data", text.string()}).code == 2);
  const auto bad_plan = scratch() / "bad.plan";
  std::ofstream(bad_plan) << "function = ishigami\nL_grid = 10\n";
  CHECK(cli({"experiment", "--plan", bad_plan.string(), "--quiet"}).code == 2);
}

TEST_CASE("si on a bivariate normal sample") {
  Rng rng(1);
  std::vector<double> xs(10000), ys(10000);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = rng.normal();
    ys[i] = 0.5 * xs[i] + std::sqrt(0.75) * rng.normal();
  }
  const auto data = write_csv("binormal.csv", xs.size(), 1, [&](std::size_t i) {
    return std::vector<double>{xs[i], ys[i]};
  });
  const auto cache = (scratch() / "beta.csv").string();
  const auto r = cli({"si", "--data", data, "--method", "mst", "--cache", cache});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# seed=1\nvariable,name,method,divergence,value,L,N,seed\n", 0) == 0);
  CHECK(std::abs(last_value(r.out) - analytic_hellinger_bivariate_normal(0.5)) < 0.02);
  const auto again = cli({"si", "--data", data, "--method", "mst", "--cache", cache});
  CHECK(again.out == r.out);
  std::ifstream cached(cache);
  std::string row;
  std::getline(cached, row);
  CHECK(row.rfind("10000,2,1,50,1,", 0) == 0);
  CHECK(row.substr(row.size() - 6) == ",ranks");
}

TEST_CASE("si on random output stays near zero") {
  Rng rng(2);
  const auto data = write_csv("random.csv", 1000, 2, [&](std::size_t) {
    return std::vector<double>{rng.uniform(), rng.uniform(), rng.uniform()};
  });
  const auto r = cli({"si", "--data", data, "--method", "kde", "--variable", "all"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("variable", 0) == 0) continue;
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c < 5; ++c) std::getline(ss, cell, ',');
    CHECK(std::abs(std::stod(cell)) < 0.05);
  }
  CHECK(rows == 2);
  const auto kl = cli({"si", "--data", data, "--method", "kde", "--divergence", "kl", "--variable", "2"});
  CHECK(kl.code == 0);
  CHECK(kl.out.find(",kl,") != std::string::npos);
}

TEST_CASE("beta command") {
  const auto r1 = cli({"beta", "--n", "500", "--reps", "5", "--seed", "9"});
  const auto r2 = cli({"beta", "--n", "500", "--reps", "5", "--seed", "9"});
  REQUIRE(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out.rfind("# seed=9\nn,d,gamma,n_rep,seed,beta,sample\n500,2,1,5,9,", 0) == 0);
  CHECK(r1.out.substr(r1.out.size() - 9) == ",uniform\n");
  const auto ranks = cli({"beta", "--n", "2", "--reps", "3", "--sample", "ranks"});
  REQUIRE(ranks.code == 0);
  CHECK(ranks.out.find("\n2,2,1,3,1,0.5") != std::string::npos);
  CHECK(cli({"beta", "--n", "20", "--sample", "lattice"}).code == 1);

  const auto cache = (scratch() / "beta_cmd.csv").string();
  const auto big = cli({"beta", "--n", "10000", "--reps", "50", "--cache", cache});
  REQUIRE(big.code == 0);
  std::stringstream row_cells(big.out.substr(big.out.rfind('\n', big.out.size() - 2) + 1));
  std::string cell;
  for (int c = 0; c < 6; ++c) std::getline(row_cells, cell, ',');
  const double beta = std::stod(cell);
  CHECK(beta >= 0.60);
  CHECK(beta <= 0.75);
  std::ifstream in(cache);
  std::string row;
  std::getline(in, row);
  CHECK(row.rfind("10000,2,1,50,1,", 0) == 0);
  CHECK(cli({"beta", "--n", "10000", "--reps", "50", "--cache", cache}).out == big.out);
}

TEST_CASE("surrogate command") {
  Rng rng(3);
  const auto linear = write_csv("linear.csv", 20, 2, [&](std::size_t) {
    const double a = rng.uniform(-5, 5), b = rng.uniform(0, 100);
    return std::vector<double>{a, b, 3 * a - 0.02 * b + 1};
  });
  const auto dump = (scratch() / "model.txt").string();
  const auto r = cli({"surrogate", "--data", linear, "--seed", "4", "--dump", dump});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# seed=4\n", 0) == 0);
  CHECK(std::stod(value_of(r.out, "fraction")) < 0.01);
  CHECK(std::filesystem::exists(dump));
  CHECK(cli({"surrogate", "--data", linear, "--seed", "4"}).out == r.out);

  const auto constant = write_csv("consty.csv", 20, 1, [](std::size_t i) {
    return std::vector<double>{double(i), 2.0};
  });
  CHECK(cli({"surrogate", "--data", constant}).code == 2);

  const double pi = 3.141592653589793;
  Rng lhs_rng(5);
  const auto design = latin_hypercube(InputLaw::uniform(std::vector<Bounds>(3, Bounds{-pi, pi})), 200, lhs_rng);
  const auto ish = write_csv("ishigami.csv", 200, 3, [&](std::size_t i) {
    const double x = design.input(0)[i], y = design.input(1)[i], z = design.input(2)[i];
    return std::vector<double>{x, y, z, ishigami_eval(x, y, z)};
  });
  const auto ri = cli({"surrogate", "--data", ish});
  REQUIRE(ri.code == 0);
  CHECK(std::stod(value_of(ri.out, "fraction")) < 0.1);
}

TEST_CASE("experiment command writes byte-stable output") {
  const auto plan = scratch() / "tiny.plan";
  std::ofstream(plan) << "function = ishigami\nN = 200\nN_ref = 300\nL_grid = 20, 50\nn_r = 1\n"
                         "methods = sample-kde, gp-mst\nseed = 5\n";
  const auto out1 = (scratch() / "run1").string();
  const auto out2 = (scratch() / "run2").string();
  const auto cache = (scratch() / "exp_beta.csv").string();
  const auto a = cli({"experiment", "--plan", plan.string(), "--out", out1, "--cache", cache, "--quiet"});
  REQUIRE(a.code == 0);
  CHECK(a.out.rfind("# seed=5\n", 0) == 0);
  const auto b = cli({"experiment", "--plan", plan.string(), "--out", out2, "--cache", cache, "--quiet",
                      "--threads", "1"});
  REQUIRE(b.code == 0);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  for (const char* f : {"records.csv", "references.csv", "summary.txt"}) {
    CHECK(slurp(std::filesystem::path(out1) / f) == slurp(std::filesystem::path(out2) / f));
  }
  CHECK(slurp(std::filesystem::path(out1) / "records.csv").rfind("# sensakit-records v1\n", 0) == 0);
  CHECK(cli({"experiment", "--plan", plan.string(), "--threads", "-1"}).code == 1);
}

}
