#include "sensakit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "sensakit/dataset.hpp"
#include "sensakit/error.hpp"
#include "sensakit/gp.hpp"
#include "sensakit/kde.hpp"
#include "sensakit/mst.hpp"
#include "sensakit/runner.hpp"
#include "sensakit/sampling.hpp"
#include "sensakit/stats.hpp"

namespace sensakit {
namespace {

// Raised for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SiArgs {
  std::string data;
  std::string output;
  std::string variable = "all";
  std::string method = "kde";
  std::string divergence = "hellinger";
  std::uint64_t seed = kDefaultBetaSeed;
  std::size_t beta_reps = kDefaultBetaReps;
  std::string beta_sample{to_string(kEstimatorBetaSample)};
  std::optional<double> bandwidth;
  std::string cache;
};

struct BetaArgs {
  std::size_t n = 0;
  std::size_t reps = kDefaultBetaReps;
  std::uint64_t seed = kDefaultBetaSeed;
  std::string sample{to_string(BetaSample::uniform)};
  std::string cache;
};

struct SurrogateArgs {
  std::string data;
  std::string output;
  std::size_t folds = 10;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
  std::string dump;
};

struct ExperimentArgs {
  std::string plan;
  std::string out;
  int threads = 0;
  bool timing = false;
  std::string cache;
  bool quiet = false;
};

// First non-comment line of a CSV file, split on commas.
std::vector<std::string> csv_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> names;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
    return names;
  }
  throw Error(ErrorCode::parse_error, path + ": no header row");
}

// Output column defaults to the last one.
Dataset load(const std::string& path, const std::string& output) {
  const auto names = csv_header(path);
  const std::string out = output.empty() ? names.back() : output;
  if (std::find(names.begin(), names.end(), out) == names.end()) {
    throw UsageError("--output: no column named '" + out + "' in " + path);
  }
  return dataset_from_csv(path, RoleMap{{out, Role::output}});
}

int cmd_si(const SiArgs& a, std::ostream& out) {
  const bool mst = a.method == "mst";
  const Divergence div = a.divergence == "kl" ? Divergence::kullback_leibler : Divergence::hellinger;
  if (mst && div != Divergence::hellinger) {
    throw UsageError("--method mst supports only --divergence hellinger");
  }
  const Dataset data = load(a.data, a.output);
  std::vector<std::size_t> vars;
  if (a.variable == "all") {
    for (std::size_t k = 0; k < data.input_count(); ++k) vars.push_back(k);
  } else {
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoul(a.variable, &used);
      if (used != a.variable.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("--variable must be 'all' or an input index");
    }
    if (k < 1 || k > data.input_count()) {
      throw UsageError("--variable " + a.variable + " out of range 1.." + std::to_string(data.input_count()));
    }
    vars.push_back(k - 1);
  }

  std::vector<SiEstimate> est;
  if (mst) {
    BetaCache cache = a.cache.empty() ? BetaCache() : BetaCache(a.cache);
    const MstCalibration cal = cache.get(data.size(), a.beta_reps, a.seed, *beta_sample_from_string(a.beta_sample));
    for (std::size_t k : vars) {
      SiEstimate e = si_mst(data.input(k), data.output(), cal);
      e.variable_index = k + 1;
      est.push_back(e);
    }
  } else {
    const KdeConfig cfg = a.bandwidth ? KdeConfig::fixed(*a.bandwidth) : KdeConfig::scott();
    std::vector<std::span<const double>> xs;
    for (std::size_t k : vars) xs.push_back(data.input(k));
    est = si_kde_columns(xs, data.output(), div, cfg);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      est[i].variable_index = vars[i] + 1;
      est[i].seed = a.seed;
    }
  }
  out << "# seed=" << a.seed << '\n';
  out << "variable,name,method,divergence,value,L,N,seed\n";
  for (const auto& e : est) {
    out << e.variable_index << ',' << data.input_column(e.variable_index - 1).name << ',' << to_string(e.method)
        << ',' << to_string(div) << ',' << format_real(e.value) << ',' << e.L << ',' << e.N << ',' << e.seed << '\n';
  }
  return exit_ok;
}

int cmd_beta(const BetaArgs& a, std::ostream& out) {
  if (a.n < 2) throw UsageError("--n must be at least 2");
  if (a.reps < 1) throw UsageError("--reps must be at least 1");
  BetaCache cache = a.cache.empty() ? BetaCache() : BetaCache(a.cache);
  const MstCalibration cal = cache.get(a.n, a.reps, a.seed, *beta_sample_from_string(a.sample));
  out << "# seed=" << a.seed << '\n';
  out << "n,d,gamma,n_rep,seed,beta,sample\n";
  out << cal.n << ',' << cal.d << ',' << format_real(cal.gamma) << ',' << cal.n_rep << ',' << cal.seed << ','
      << format_real(cal.beta) << ',' << to_string(cal.sample) << '\n';
  return exit_ok;
}

int cmd_surrogate(const SurrogateArgs& a, std::ostream& out) {
  const Dataset data = load(a.data, a.output);
  if (a.folds < 2 || a.folds > data.size()) {
    throw UsageError("--folds must lie in 2.." + std::to_string(data.size()));
  }
  if (a.restarts < 1) throw UsageError("--restarts must be at least 1");
  // Inputs are mapped to the unit cube through their observed ranges.
  std::vector<Bounds> domain;
  for (std::size_t k = 0; k < data.input_count(); ++k) {
    const auto& col = data.input_column(k);
    if (col.bounds) {
      domain.push_back(*col.bounds);
      continue;
    }
    const auto [lo, hi] = std::minmax_element(col.values.begin(), col.values.end());
    if (!(*hi > *lo)) throw Error(ErrorCode::degenerate_column, "input '" + col.name + "' is constant");
    domain.push_back({*lo, *hi});
  }
  const Eigen::MatrixXd x = input_matrix(data);
  const auto y = data.output();
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  if (is_constant(y)) throw Error(ErrorCode::degenerate_output, "output column is constant");

  GpFitOptions fit;
  fit.restarts = a.restarts;
  Rng rng(a.seed);
  Rng fit_rng = rng.split(0);
  Rng cv_rng = rng.split(1);
  const GpModel model = gp_fit(x, yv, domain, fit, fit_rng);
  const CvResult cv = cross_validate(x, yv, domain, a.folds, fit, cv_rng);

  out << "# seed=" << a.seed << '\n';
  write_model_dump(out, model);
  out << "folds = " << a.folds << '\n';
  out << "r2 = " << format_real(cv.r2) << '\n';
  out << "fraction = " << format_real(cv.fraction) << '\n';
  if (!a.dump.empty()) {
    std::ofstream f(a.dump);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + a.dump);
    write_model_dump(f, model);
  }
  return exit_ok;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  if (a.threads < 0) throw UsageError("--threads must be non-negative");
  const ExperimentPlan plan = parse_plan_file(a.plan);
  if (a.threads > 0) omp_set_num_threads(a.threads);
  const std::filesystem::path dir = a.out.empty() ? std::filesystem::path("results") / plan.name : std::filesystem::path(a.out);
  RunOptions opts;
  opts.threads = a.threads;
  opts.timing = a.timing;
  std::optional<BetaCache> cache;
  if (!a.cache.empty()) cache.emplace(a.cache);
  else cache.emplace();
  opts.beta_cache = &*cache;
  if (!a.quiet) opts.log = &err;

  out << "# seed=" << plan.seed << '\n';
  const ExperimentResult result = run_experiment(plan, opts);
  write_experiment(dir, result);
  write_summary(out, result);
  out << "\nwritten to " << dir.string() << '\n';
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divergence-based global sensitivity indices", "sensakit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sensakit 1.0.0");

  SiArgs si;
  auto* si_cmd = app.add_subcommand("si", "Sensitivity indices from a CSV sample");
  si_cmd->add_option("--data", si.data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  si_cmd->add_option("--output", si.output, "Output column name (default: last column)");
  si_cmd->add_option("--variable", si.variable, "1-based input index or 'all'")->capture_default_str();
  si_cmd->add_option("--method", si.method, "Estimator")->check(CLI::IsMember({"kde", "mst"}))->capture_default_str();
  si_cmd->add_option("--divergence", si.divergence, "f-divergence")
      ->check(CLI::IsMember({"hellinger", "kl"}))
      ->capture_default_str();
  si_cmd->add_option("--seed", si.seed, "Seed of the beta calibration")->capture_default_str();
  si_cmd->add_option("--beta-reps", si.beta_reps, "Repetitions of the beta calibration")->capture_default_str();
  si_cmd->add_option("--beta-sample", si.beta_sample, "Point sets of the beta calibration")
      ->check(CLI::IsMember({"ranks", "uniform"}))
      ->capture_default_str();
  si_cmd->add_option("--bandwidth", si.bandwidth, "Fixed KDE bandwidth on standardized data (default: Scott)")
      ->check(CLI::PositiveNumber);
  si_cmd->add_option("--cache", si.cache, "Beta calibration cache file");

  BetaArgs beta;
  auto* beta_cmd = app.add_subcommand("beta", "Calibrate the MST normalising constant");
  beta_cmd->add_option("--n", beta.n, "Sample size")->required();
  beta_cmd->add_option("--reps", beta.reps, "Point sets averaged")->capture_default_str();
  beta_cmd->add_option("--sample", beta.sample, "uniform: i.i.d. points; ranks: random permutation lattice")
      ->check(CLI::IsMember({"uniform", "ranks"}))
      ->capture_default_str();
  beta_cmd->add_option("--seed", beta.seed, "Seed")->capture_default_str();
  beta_cmd->add_option("--cache", beta.cache, "Cache file; new values are appended");

  SurrogateArgs sur;
  auto* sur_cmd = app.add_subcommand("surrogate", "Fit a Gaussian process and cross-validate it");
  sur_cmd->add_option("--data", sur.data, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  sur_cmd->add_option("--output", sur.output, "Output column name (default: last column)");
  sur_cmd->add_option("--folds", sur.folds, "Cross-validation folds")->capture_default_str();
  sur_cmd->add_option("--restarts", sur.restarts, "Likelihood optimisation restarts")->capture_default_str();
  sur_cmd->add_option("--seed", sur.seed, "Seed")->capture_default_str();
  sur_cmd->add_option("--dump", sur.dump, "Also write the hyperparameters to this file");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment plan");
  exp_cmd->add_option("--plan", exp.plan, "Plan file")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--out", exp.out, "Output directory (default: results/<plan name>)");
  exp_cmd->add_option("--threads", exp.threads, "Worker threads, 0 for all cores")->capture_default_str();
  exp_cmd->add_flag("--timing", exp.timing, "Record wall-clock seconds per estimate");
  exp_cmd->add_option("--cache", exp.cache, "Beta calibration cache file");
  exp_cmd->add_flag("--quiet", exp.quiet, "No progress output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  try {
    if (si_cmd->parsed()) return cmd_si(si, out);
    if (beta_cmd->parsed()) return cmd_beta(beta, out);
    if (sur_cmd->parsed()) return cmd_surrogate(sur, out);
    if (exp_cmd->parsed()) return cmd_experiment(exp, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_runtime;
  }
  return exit_usage;
}

}  // namespace sensakit
