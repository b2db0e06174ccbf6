#include "sensakit/plan.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <string_view>

#include "sensakit/error.hpp"

namespace sensakit {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::parse_error, where + ": " + what);
}

double parse_real(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) fail(where, "expected a number, got '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_count(std::string_view s, const std::string& where) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && p == s.data() + s.size() && !s.empty()) return v;
  // Allow scientific integers such as 1e5.
  const double d = parse_real(s, where);
  if (!(d >= 0.0) || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
    fail(where, "expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return static_cast<std::uint64_t>(d);
}

std::vector<double> parse_reals(std::string_view s, const std::string& where) {
  std::vector<double> out;
  for (auto part : split(s, ',')) out.push_back(parse_real(part, where));
  return out;
}

}  // namespace

bool ExperimentPlan::has(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

std::vector<TestFunction> ExperimentPlan::cases() const {
  if (function == "binormal") {
    std::vector<TestFunction> out;
    for (double rho : function_params) out.push_back(TestFunction::bivariate_normal(rho));
    return out;
  }
  return {TestFunction::from_name(function, function_params)};
}

InputLaw ExperimentPlan::input_law(const TestFunction& fn) const {
  if (law == "normal") return InputLaw::standard_normal(fn.dimension());
  if (law == "copula") return InputLaw::copula(sigma, fn.bounds());
  return InputLaw::uniform(fn.bounds());
}

void validate(const ExperimentPlan& plan) {
  auto bad = [&](const std::string& what) { throw Error(ErrorCode::invalid_argument, "plan " + plan.name + ": " + what); };
  if (plan.L_grid.empty()) bad("L_grid is empty");
  if (plan.methods.empty()) bad("methods is empty");
  if (plan.n_r < 1) bad("n_r must be at least 1");
  if (plan.N < 2) bad("N must be at least 2");
  for (std::size_t L : plan.L_grid) {
    if (L < 1) bad("L_grid entries must be positive");
    if (L > plan.N) bad("L_grid entry " + std::to_string(L) + " exceeds N = " + std::to_string(plan.N));
  }
  if (plan.law != "uniform" && plan.law != "copula" && plan.law != "normal") bad("unknown law '" + plan.law + "'");
  if (plan.function == "binormal") {
    if (plan.function_params.empty()) bad("binormal needs at least one correlation");
    if (plan.law != "normal") bad("binormal requires law = normal");
  } else if (plan.law == "normal") {
    bad("law = normal is only meaningful for binormal");
  }
  const auto cs = plan.cases();  // validates the function name and its parameters
  if (plan.law == "copula") {
    if (plan.sigma.size() == 0) bad("law = copula requires sigma");
    for (const auto& fn : cs) (void)plan.input_law(fn);
  }
}

ExperimentPlan parse_plan(std::istream& in, const std::string& origin) {
  ExperimentPlan plan;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(where, "expected 'key = value'");
    const std::string key(trim(s.substr(0, eq)));
    const std::string_view value = trim(s.substr(eq + 1));
    if (value.empty()) fail(where, "empty value for '" + key + "'");
    if (!seen.insert(key).second) fail(where, "repeated key '" + key + "'");

    if (key == "function") {
      const auto open = value.find('(');
      if (open == std::string_view::npos) {
        plan.function = std::string(value);
      } else {
        if (value.back() != ')') fail(where, "unbalanced parentheses in function");
        plan.function = std::string(trim(value.substr(0, open)));
        const auto inner = trim(value.substr(open + 1, value.size() - open - 2));
        if (!inner.empty()) plan.function_params = parse_reals(inner, where);
      }
    } else if (key == "law") {
      plan.law = std::string(value);
    } else if (key == "sigma") {
      std::vector<std::vector<double>> rows;
      for (auto row : split(value, ';')) rows.push_back(parse_reals(row, where));
      const std::size_t d = rows.size();
      plan.sigma.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < d; ++i) {
        if (rows[i].size() != d) fail(where, "sigma must be square");
        for (std::size_t j = 0; j < d; ++j) {
          plan.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
      }
    } else if (key == "N") {
      plan.N = parse_count(value, where);
    } else if (key == "N_ref") {
      plan.N_ref = parse_count(value, where);
    } else if (key == "L_grid") {
      for (auto part : split(value, ',')) plan.L_grid.push_back(parse_count(part, where));
    } else if (key == "n_r") {
      plan.n_r = parse_count(value, where);
    } else if (key == "methods") {
      for (auto part : split(value, ',')) {
        const auto m = method_from_string(part);
        if (!m) fail(where, "unknown method '" + std::string(part) + "'");
        if (std::find(plan.methods.begin(), plan.methods.end(), *m) == plan.methods.end()) plan.methods.push_back(*m);
      }
    } else if (key == "seed") {
      plan.seed = parse_count(value, where);
    } else {
      fail(where, "unknown key '" + key + "'");
    }
  }
  for (const char* required : {"function", "L_grid", "methods"}) {
    if (!seen.count(required)) fail(origin, std::string("missing required key '") + required + "'");
  }
  std::sort(plan.L_grid.begin(), plan.L_grid.end());
  plan.L_grid.erase(std::unique(plan.L_grid.begin(), plan.L_grid.end()), plan.L_grid.end());
  validate(plan);
  return plan;
}

ExperimentPlan parse_plan_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open plan file " + path.string());
  ExperimentPlan plan = parse_plan(in, path.string());
  plan.name = path.stem().string();
  return plan;
}

}  // namespace sensakit
