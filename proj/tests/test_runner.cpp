#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "sensakit/plan.hpp"
#include "sensakit/runner.hpp"
#include "test_util.hpp"

using namespace sensakit;
using sensakit::testing::code_of;

namespace {

ExperimentPlan plan_from(const std::string& text, const std::string& name = "test") {
  std::istringstream in(text);
  auto p = parse_plan(in);
  p.name = name;
  return p;
}

std::string records_text(const std::vector<ConvergenceRecord>& r) {
  std::ostringstream out;
  write_records_csv(out, r);
  return out.str();
}

const char* kSmallIshigami =
    "function = ishigami(7, 0.1)\n"
    "law = uniform\n"
    "N = 300\n"
    "N_ref = 400\n"
    "L_grid = 20, 40\n"
    "n_r = 2\n"
    "methods = sample-kde, sample-mst, gp-kde, gp-mst, sc-kde, direct-kde, direct-mst\n"
    "seed = 3\n";

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("plan parsing") {
  const auto p = plan_from(
      "# comment line\n"
      "function = ishigami(7, 0.1)   # trailing comment\n"
      "law = copula\n"
      "sigma = 1, 0.8, 0.5; 0.8, 1, 0.8; 0.5, 0.8, 1\n"
      "N = 1e3\n"
      "N_ref = 100000\n"
      "L_grid = 200, 30, 50, 30, 100\n"
      "n_r = 10\n"
      "methods = sample-kde, gp-mst\n"
      "seed = 42\n");
  CHECK(p.function == "ishigami");
  CHECK(p.function_params == std::vector<double>{7, 0.1});
  CHECK(p.law == "copula");
  CHECK(p.sigma(0, 1) == 0.8);
  CHECK(p.sigma(2, 0) == 0.5);
  CHECK(p.N == 1000);
  CHECK(p.L_grid == std::vector<std::size_t>{30, 50, 100, 200});
  CHECK(p.methods == std::vector<Method>{Method::sample_kde, Method::gp_mst});
  CHECK(p.has(Method::gp_mst));
  CHECK_FALSE(p.has(Method::sc_kde));
  CHECK(p.seed == 42);
  CHECK(p.cases().size() == 1);
  CHECK(p.input_law(p.cases()[0]).kind() == InputLaw::Kind::gaussian_copula);
}

TEST_CASE("binormal plans have one case per correlation") {
  const auto p = plan_from("function = binormal(0, 0.5, 0.9)\nlaw = normal\nN = 100\nL_grid = 100\n"
                           "methods = sample-mst\n");
  const auto cases = p.cases();
  REQUIRE(cases.size() == 3);
  CHECK(cases[1].rho() == 0.5);
}

TEST_CASE("plan errors") {
  auto code = [](const std::string& text) {
    return code_of([&] { plan_from(text); });
  };
  const std::string base = "function = ishigami\nL_grid = 10\nmethods = sample-kde\n";
  CHECK_NOTHROW(plan_from(base));
  CHECK(code(base + "colour = blue\n") == ErrorCode::parse_error);
  CHECK(code(base + "N = 100\nN = 200\n") == ErrorCode::parse_error);
  CHECK(code(base + "just some words\n") == ErrorCode::parse_error);
  CHECK(code(base + "N = many\n") == ErrorCode::parse_error);
  CHECK(code("function = ishigami\nmethods = sample-kde\n") == ErrorCode::parse_error);
  CHECK(code(base + "methods2 = x\n") == ErrorCode::parse_error);
  CHECK(code("function = ishigami\nL_grid = 10\nmethods = sample-foo\n") == ErrorCode::parse_error);
  CHECK(code(base + "N = 5\n") == ErrorCode::invalid_argument);
  CHECK(code(base + "n_r = 0\n") == ErrorCode::invalid_argument);
  CHECK(code(base + "law = copula\n") == ErrorCode::invalid_argument);
  CHECK(code(base + "law = normal\n") == ErrorCode::invalid_argument);
  CHECK(code("function = binormal(0.5)\nlaw = uniform\nL_grid = 10\nmethods = sample-kde\n") ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] { parse_plan_file("/nonexistent/x.plan"); }) == ErrorCode::missing_file);
}

TEST_CASE("bundled plans parse") {
  const std::filesystem::path dir = std::filesystem::path(SENSAKIT_SOURCE_DIR) / "plans";
  std::set<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".plan") continue;
    const auto p = parse_plan_file(entry.path());
    CHECK(p.name == entry.path().stem().string());
    names.insert(p.name);
  }
  for (const char* n : {"fig1", "fig2", "fig5", "fig7", "fig8", "fig9", "fig10"}) CHECK(names.count(n) == 1);
}

TEST_CASE("binormal references use the closed form") {
  const auto p = plan_from("function = binormal(0.5)\nlaw = normal\nN = 100\nL_grid = 100\n"
                           "methods = sample-mst, sample-kde\n");
  const auto refs = run_reference(p);
  REQUIRE(refs.size() == 2);
  for (const auto& r : refs) {
    CHECK(r.value == analytic_hellinger_bivariate_normal(0.5));
    CHECK(r.n == 0);
    REQUIRE(r.parameter);
    CHECK(*r.parameter == 0.5);
  }
}

TEST_CASE("random-output references are near zero") {
  const auto p = plan_from("function = random\nN = 100\nN_ref = 5000\nL_grid = 100\n"
                           "methods = sample-mst, sample-kde\nseed = 4\n");
  BetaCache cache;
  RunOptions o;
  o.beta_cache = &cache;
  const auto refs = run_reference(p, o);
  REQUIRE(refs.size() == 2);
  for (const auto& r : refs) {
    CHECK(std::abs(r.value) < 0.05);
    CHECK(r.n == 5000);
  }
}

TEST_CASE("full method matrix: records, errors and determinism") {
  const auto p = plan_from(kSmallIshigami);
  BetaCache cache;
  RunOptions serial;
  serial.threads = 1;
  serial.beta_cache = &cache;
  serial.gp_restarts = 3;
  const auto result = run_experiment(p, serial);
  REQUIRE_FALSE(result.records.empty());

  std::set<Method> seen;
  for (const auto& r : result.records) {
    seen.insert(r.method);
    CHECK(r.abs_error == std::abs(r.estimate - r.reference));
    CHECK(r.variable >= 1);
    CHECK(r.variable <= 3);
    CHECK(r.wall_seconds == 0.0);
    const auto ref = std::find_if(result.references.begin(), result.references.end(), [&](const Reference& x) {
      return x.variable == r.variable && x.family == family_of(r.method);
    });
    REQUIRE(ref != result.references.end());
    CHECK(r.reference == ref->value);
    if (r.method == Method::gp_kde || r.method == Method::gp_mst || r.method == Method::direct_kde ||
        r.method == Method::direct_mst) {
      CHECK(r.cv_fraction.has_value());
    }
    if (r.method == Method::sc_kde) {
      // The largest tensor grid within L = 20 or 40 on three inputs is 2^3 or 3^3.
      CHECK((r.L == 8 || r.L == 27));
    } else {
      CHECK((r.L == 20 || r.L == 40));
    }
  }
  CHECK(seen.size() == 7);

  RunOptions threaded = serial;
  threaded.threads = 3;
  const auto again = run_plan(p, result.references, threaded);
  CHECK(records_text(again) == records_text(result.records));
}

TEST_CASE("piston collocation uses the 2^7 grid") {
  const auto p = plan_from("function = piston\nN = 400\nN_ref = 400\nL_grid = 200\nn_r = 1\n"
                           "methods = sc-kde\nseed = 8\n");
  const auto result = run_experiment(p);
  REQUIRE(result.records.size() == 7);
  for (const auto& r : result.records) {
    CHECK(r.method == Method::sc_kde);
    CHECK(r.L == 128);
  }
}

TEST_CASE("collocation notes for small grids and dependent inputs") {
  const auto p = plan_from("function = ishigami\nlaw = copula\nsigma = 1, 0.8, 0.5; 0.8, 1, 0.8; 0.5, 0.8, 1\n"
                           "N = 300\nN_ref = 300\nL_grid = 5, 30\nn_r = 1\nmethods = sc-kde\nseed = 9\n");
  const auto result = run_experiment(p);
  bool skipped = false, dependent = false;
  for (const auto& n : result.notes) {
    skipped |= n.find("skipped") != std::string::npos;
    dependent |= n.find("dependent") != std::string::npos;
  }
  CHECK(skipped);
  CHECK(dependent);
  for (const auto& r : result.records) CHECK(r.L == 27);
}

TEST_CASE("csv writers") {
  ConvergenceRecord r;
  r.variable = 2;
  r.method = Method::gp_mst;
  r.L = 50;
  r.repetition = 3;
  r.estimate = 0.25;
  r.reference = 0.125;
  r.abs_error = 0.125;
  r.cv_fraction = 0.01;
  std::ostringstream out;
  write_records_csv(out, {r});
  CHECK(out.str() ==
        "# sensakit-records v1\n"
        "variable,method,L,repetition,estimate,reference,abs_error,cv_fraction,wall_seconds\n"
        "2,gp-mst,50,3,0.25,0.125,0.125,0.01,0\n");

  Reference ref;
  ref.variable = 1;
  ref.family = Family::kde;
  ref.value = 0.5;
  ref.n = 100000;
  ref.source = "true-model";
  std::ostringstream rout;
  write_references_csv(rout, {ref});
  CHECK(rout.str().rfind("# sensakit-references v1\nvariable,family,parameter,n,value,source\n", 0) == 0);
  CHECK(rout.str().find("1,kde,,100000,0.5,true-model") != std::string::npos);

  CHECK(format_real(0.1) == "0.1");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("write_experiment creates the three files") {
  const auto p = plan_from("function = binormal(0.3)\nlaw = normal\nN = 50\nL_grid = 50\nn_r = 1\n"
                           "methods = sample-kde\nseed = 2\n");
  const auto result = run_experiment(p);
  const auto dir = std::filesystem::temp_directory_path() / "sensakit_test_experiment";
  std::filesystem::remove_all(dir);
  write_experiment(dir, result);
  for (const char* f : {"records.csv", "references.csv", "summary.txt"}) CHECK(std::filesystem::exists(dir / f));
  std::ifstream in(dir / "records.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first == "# sensakit-records v1");
  std::filesystem::remove_all(dir);
}

}
