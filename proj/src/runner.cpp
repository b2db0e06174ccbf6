#include "sensakit/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include <omp.h>

#include "sensakit/collocation.hpp"
#include "sensakit/direct.hpp"
#include "sensakit/error.hpp"
#include "sensakit/gp.hpp"
#include "sensakit/kde.hpp"
#include "sensakit/sampling.hpp"
#include "sensakit/testbed.hpp"

namespace sensakit {
namespace {

using Clock = std::chrono::steady_clock;

bool needs_family(const ExperimentPlan& plan, Family f) {
  return std::any_of(plan.methods.begin(), plan.methods.end(), [&](Method m) { return family_of(m) == f; });
}

bool needs_gp(const ExperimentPlan& plan) {
  return plan.has(Method::gp_kde) || plan.has(Method::gp_mst) || plan.has(Method::direct_kde) ||
         plan.has(Method::direct_mst);
}

// GP inputs are mapped to the unit cube when the bounds are finite.
std::vector<Bounds> gp_domain(const TestFunction& fn) {
  for (const Bounds& b : fn.bounds()) {
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper)) return {};
  }
  return fn.bounds();
}

Eigen::VectorXd to_vector(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Stream layout of one (repetition, L) task.
enum Stream : std::uint64_t { design = 0, outputs = 1, pool = 2, pool_outputs = 3, gp_fit_stream = 4, cv = 5 };

struct Calibrations {
  std::map<std::size_t, MstCalibration> by_n;
  const MstCalibration& at(std::size_t n) const { return by_n.at(n); }
};

Calibrations calibrate(const std::vector<std::size_t>& sizes, const RunOptions& options) {
  BetaCache local;
  BetaCache& cache = options.beta_cache != nullptr ? *options.beta_cache : local;
  Calibrations out;
  for (std::size_t n : sizes) {
    if (n < 2 || out.by_n.count(n)) continue;
    if (options.log && !cache.find(n, options.beta_reps, options.beta_seed, options.beta_sample)) {
      *options.log << "calibrating beta at n=" << n << " (" << options.beta_reps << " " << to_string(options.beta_sample)
                   << " reps)\n" << std::flush;
    }
    out.by_n[n] = cache.get(n, options.beta_reps, options.beta_seed, options.beta_sample);
  }
  return out;
}

double reference_for(const std::vector<Reference>& refs, std::size_t variable, Family f) {
  for (const auto& r : refs) {
    if (r.variable == variable && r.family == f) return r.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct TaskOutput {
  std::vector<ConvergenceRecord> records;
  std::vector<std::string> notes;
  std::exception_ptr failure;
};

struct TaskContext {
  const ExperimentPlan& plan;
  const std::vector<Reference>& references;
  const RunOptions& options;
  const Calibrations& betas;
  const std::map<std::size_t, PermutationPlan>& permutations;  // by case
  std::vector<bool> sc_first;                                  // per L index
};

std::string where(std::size_t rep, std::size_t L) {
  return "repetition " + std::to_string(rep) + ", L=" + std::to_string(L);
}

void run_task(const TaskContext& ctx, std::size_t case_index, std::size_t variable_offset, std::size_t rep,
              std::size_t li, TaskOutput& out) {
  const ExperimentPlan& plan = ctx.plan;
  const TestFunction fn = plan.cases()[case_index];
  const InputLaw law = plan.input_law(fn);
  const std::size_t d = fn.dimension();
  const std::size_t L = plan.L_grid[li];
  const std::size_t N = plan.N;
  Rng task = Rng(plan.seed).split(case_index).split(rep).split(li);

  std::map<Method, std::vector<double>> values;
  std::map<Method, std::size_t> budget;
  std::map<Method, double> seconds;
  std::optional<double> cv_fraction;

  auto timed = [&](Method m, auto&& body) {
    const auto t0 = Clock::now();
    try {
      body();
      seconds[m] = std::chrono::duration<double>(Clock::now() - t0).count();
    } catch (const Error& e) {
      values.erase(m);
      out.notes.push_back(std::string(to_string(m)) + " skipped at " + where(rep, L) + ": " + e.what());
    }
  };

  Rng design_rng = task.split(design);
  const Dataset xl = law.kind() == InputLaw::Kind::independent_uniform ? latin_hypercube(law, L, design_rng)
                                                                         : monte_carlo(law, L, design_rng);
  Rng out_rng = task.split(outputs);
  const Dataset xyl = xl.with_output(fn.outputs(xl, out_rng));

  if (plan.has(Method::sample_kde)) {
    timed(Method::sample_kde, [&] {
      for (const auto& e : si_kde_all(xyl, Divergence::hellinger, KdeConfig::scott())) {
        values[Method::sample_kde].push_back(e.value);
      }
      budget[Method::sample_kde] = L;
    });
  }
  if (plan.has(Method::sample_mst)) {
    timed(Method::sample_mst, [&] {
      if (L < 2) throw Error(ErrorCode::invalid_argument, "MST estimator needs L >= 2");
      for (std::size_t k = 0; k < d; ++k) {
        values[Method::sample_mst].push_back(si_mst(xyl.input(k), xyl.output(), ctx.betas.at(L)).value);
      }
      budget[Method::sample_mst] = L;
    });
  }

  const bool want_pool = needs_gp(plan) || plan.has(Method::sc_kde);
  Dataset extra;
  if (want_pool && N > L) {
    Rng pool_rng = task.split(pool);
    extra = monte_carlo(law, N - L, pool_rng);
  }
  auto pool_inputs = [&]() {
    if (extra.size() == 0) return xl;
    std::vector<Column> cols;
    for (std::size_t k = 0; k < d; ++k) {
      Column c = xl.input_column(k);
      const auto more = extra.input(k);
      c.values.insert(c.values.end(), more.begin(), more.end());
      cols.push_back(std::move(c));
    }
    return Dataset(std::move(cols), "pool");
  };

  const bool want_direct = plan.has(Method::direct_kde) || plan.has(Method::direct_mst);
  if (needs_gp(plan) && L == N && !want_direct) {
    // Nothing to augment: the surrogate methods see the sample itself.
    if (plan.has(Method::gp_kde)) {
      timed(Method::gp_kde, [&] {
        for (const auto& e : si_kde_all(xyl, Divergence::hellinger, KdeConfig::scott())) {
          values[Method::gp_kde].push_back(e.value);
        }
        budget[Method::gp_kde] = L;
      });
    }
    if (plan.has(Method::gp_mst)) {
      timed(Method::gp_mst, [&] {
        for (std::size_t k = 0; k < d; ++k) {
          values[Method::gp_mst].push_back(si_mst(xyl.input(k), xyl.output(), ctx.betas.at(N)).value);
        }
        budget[Method::gp_mst] = L;
      });
    }
  } else if (needs_gp(plan)) {
    std::optional<GpModel> model;
    const auto domain = gp_domain(fn);
    const Eigen::MatrixXd x = input_matrix(xl);
    const Eigen::VectorXd y = to_vector(xyl.output());
    GpFitOptions fit;
    fit.restarts = ctx.options.gp_restarts;
    try {
      Rng gp_rng = task.split(gp_fit_stream);
      model = gp_fit(x, y, domain, fit, gp_rng);
    } catch (const Error& e) {
      out.notes.push_back("gp fit failed at " + where(rep, L) + ": " + e.what());
    }
    if (model && L >= ctx.options.cv_folds && ctx.options.cv_folds >= 2) {
      try {
        Rng cv_rng = task.split(cv);
        cv_fraction = cross_validate(x, y, domain, ctx.options.cv_folds, fit, cv_rng).fraction;
      } catch (const Error& e) {
        out.notes.push_back("cross validation failed at " + where(rep, L) + ": " + e.what());
      }
    }
    if (model) {
      const Dataset augmented = gp_augment(*model, xyl, extra);
      if (plan.has(Method::gp_kde)) {
        timed(Method::gp_kde, [&] {
          for (const auto& e : si_kde_all(augmented, Divergence::hellinger, KdeConfig::scott())) {
            values[Method::gp_kde].push_back(e.value);
          }
          budget[Method::gp_kde] = L;
        });
      }
      if (plan.has(Method::gp_mst)) {
        timed(Method::gp_mst, [&] {
          for (std::size_t k = 0; k < d; ++k) {
            values[Method::gp_mst].push_back(si_mst(augmented.input(k), augmented.output(), ctx.betas.at(N)).value);
          }
          budget[Method::gp_mst] = L;
        });
      }
      for (const Method m : {Method::direct_kde, Method::direct_mst}) {
        if (!plan.has(m)) continue;
        timed(m, [&] {
          DirectOptions opts;
          opts.estimator = m == Method::direct_mst ? DirectOptions::Estimator::mst : DirectOptions::Estimator::kde;
          if (m == Method::direct_mst) opts.mst = ctx.betas.at(N);
          const Dataset xplus = augmented.inputs_only();
          for (const auto& e : si_direct_all(xplus, *model, opts, ctx.permutations.at(case_index))) {
            values[m].push_back(e.value);
          }
          budget[m] = L;
        });
      }
    }
  }

  if (plan.has(Method::sc_kde) && ctx.sc_first[li]) {
    timed(Method::sc_kde, [&] {
      if (!fn.deterministic()) throw Error(ErrorCode::unsupported_design, "collocation needs a deterministic model");
      const std::size_t m = sc_nodes_for_budget(d, L);
      const ScModel sc = sc_build(fn.bounds(), m, [&](std::span<const double> p) { return fn.evaluate(p); }, L);
      const Dataset xs = pool_inputs();
      const Eigen::VectorXd ys = sc_interpolate(sc, input_matrix(xs));
      const Dataset data = xs.with_output(std::vector<double>(ys.data(), ys.data() + ys.size()));
      for (const auto& e : si_kde_all(data, Divergence::hellinger, KdeConfig::scott())) {
        values[Method::sc_kde].push_back(e.value);
      }
      budget[Method::sc_kde] = sc.values().size();
    });
  }

  for (const Method m : plan.methods) {
    const auto it = values.find(m);
    if (it == values.end()) continue;
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      ConvergenceRecord r;
      r.variable = variable_offset + k + 1;
      r.method = m;
      r.L = budget.at(m);
      r.repetition = rep;
      r.estimate = it->second[k];
      r.reference = reference_for(ctx.references, r.variable, family_of(m));
      r.abs_error = std::abs(r.estimate - r.reference);
      if (m != Method::sample_kde && m != Method::sample_mst && m != Method::sc_kde) r.cv_fraction = cv_fraction;
      r.wall_seconds = ctx.options.timing ? seconds[m] : 0.0;
      out.records.push_back(r);
    }
  }
  if (cv_fraction && *cv_fraction > kPoorFitFraction) {
    out.notes.push_back("poor surrogate at " + where(rep, L) + ": cv fraction " + format_real(*cv_fraction));
  }
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string_view to_string(Family f) noexcept { return f == Family::kde ? "kde" : "mst"; }

Family family_of(Method m) noexcept { return uses_mst(m) ? Family::mst : Family::kde; }

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<Reference> run_reference(const ExperimentPlan& plan, const RunOptions& options) {
  validate(plan);
  const bool kde = needs_family(plan, Family::kde);
  const bool mst = needs_family(plan, Family::mst);
  const auto cases = plan.cases();
  std::vector<Reference> refs;
  std::size_t offset = 0;
  std::optional<Calibrations> betas;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const TestFunction& fn = cases[c];
    if (fn.kind() == TestFunction::Kind::bivariate_normal) {
      const double s = analytic_hellinger_bivariate_normal(fn.rho());
      for (const Family f : {Family::kde, Family::mst}) {
        if ((f == Family::kde && !kde) || (f == Family::mst && !mst)) continue;
        refs.push_back({offset + 1, f, s, 0, fn.rho(), "analytic"});
      }
      offset += 1;
      continue;
    }
    if (options.log) *options.log << "reference data: " << fn.name() << ", n=" << plan.N_ref << '\n' << std::flush;
    Rng rng = Rng(plan.seed, 1).split(c);
    const Dataset data = make_inputs(fn, plan.input_law(fn), plan.N_ref, rng);
    if (kde) {
      for (const auto& e : si_kde_all(data, Divergence::hellinger, KdeConfig::scott())) {
        refs.push_back({offset + e.variable_index, Family::kde, e.value, plan.N_ref, std::nullopt, "kde"});
      }
    }
    if (mst) {
      if (!betas) betas = calibrate({plan.N_ref}, options);
      for (std::size_t k = 0; k < fn.dimension(); ++k) {
        const double v = si_mst(data.input(k), data.output(), betas->at(plan.N_ref)).value;
        refs.push_back({offset + k + 1, Family::mst, v, plan.N_ref, std::nullopt, "mst"});
      }
    }
    offset += fn.dimension();
  }
  std::stable_sort(refs.begin(), refs.end(), [](const Reference& a, const Reference& b) {
    return std::tie(a.variable, a.family) < std::tie(b.variable, b.family);
  });
  return refs;
}

std::vector<ConvergenceRecord> run_plan(const ExperimentPlan& plan, const std::vector<Reference>& references,
                                        const RunOptions& options, std::vector<std::string>* notes) {
  validate(plan);
  const auto cases = plan.cases();

  std::vector<std::size_t> sizes;
  if (plan.has(Method::sample_mst)) sizes.insert(sizes.end(), plan.L_grid.begin(), plan.L_grid.end());
  if (plan.has(Method::gp_mst) || plan.has(Method::direct_mst)) sizes.push_back(plan.N);
  const Calibrations betas = calibrate(sizes, options);

  std::map<std::size_t, PermutationPlan> permutations;
  if (plan.has(Method::direct_kde) || plan.has(Method::direct_mst)) {
    for (std::size_t c = 0; c < cases.size(); ++c) permutations[c] = build_permutation_plan(plan.N, cases[c].dimension());
  }

  TaskContext ctx{plan, references, options, betas, permutations, std::vector<bool>(plan.L_grid.size(), false)};
  std::vector<std::string> pre_notes;
  if (plan.has(Method::sc_kde)) {
    // One collocation run per distinct grid; smaller budgets that cannot
    // hold two nodes per dimension are skipped.
    std::set<std::size_t> grids;
    const std::size_t d = cases.front().dimension();
    for (std::size_t li = 0; li < plan.L_grid.size(); ++li) {
      const std::size_t m = sc_nodes_for_budget(d, plan.L_grid[li]);
      if (m < 2) {
        pre_notes.push_back("sc-kde skipped at L=" + std::to_string(plan.L_grid[li]) +
                            ": fewer than 2 nodes per dimension fit the budget");
      } else if (grids.insert(m).second) {
        ctx.sc_first[li] = true;
      }
    }
    if (plan.law != "uniform") {
      pre_notes.push_back("sc-kde uses Gauss-Legendre nodes of the uniform law although the inputs are dependent");
    }
  }

  struct Task {
    std::size_t case_index, offset, rep, li;
  };
  std::vector<Task> tasks;
  for (std::size_t rep = 0; rep < plan.n_r; ++rep) {
    for (std::size_t li = 0; li < plan.L_grid.size(); ++li) {
      std::size_t offset = 0;
      for (std::size_t c = 0; c < cases.size(); ++c) {
        tasks.push_back({c, offset, rep, li});
        offset += cases[c].dimension();
      }
    }
  }

  std::vector<TaskOutput> outputs(tasks.size());
  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    try {
      run_task(ctx, tasks[t].case_index, tasks[t].offset, tasks[t].rep, tasks[t].li, outputs[t]);
    } catch (...) {
      outputs[t].failure = std::current_exception();
    }
  }

  std::vector<ConvergenceRecord> records;
  if (notes) notes->insert(notes->end(), pre_notes.begin(), pre_notes.end());
  for (auto& o : outputs) {
    if (o.failure) std::rethrow_exception(o.failure);
    records.insert(records.end(), o.records.begin(), o.records.end());
    if (notes) notes->insert(notes->end(), o.notes.begin(), o.notes.end());
  }
  return records;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, const RunOptions& options) {
  ExperimentResult result;
  result.plan = plan;
  const auto t0 = Clock::now();
  result.references = run_reference(plan, options);
  if (options.log) {
    *options.log << "references done in " << fixed(std::chrono::duration<double>(Clock::now() - t0).count(), 1)
                 << " s\n" << std::flush;
  }
  result.records = run_plan(plan, result.references, options, &result.notes);
  return result;
}

void write_records_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << "# sensakit-records v1\n";
  out << "variable,method,L,repetition,estimate,reference,abs_error,cv_fraction,wall_seconds\n";
  for (const auto& r : records) {
    out << r.variable << ',' << to_string(r.method) << ',' << r.L << ',' << r.repetition << ','
        << format_real(r.estimate) << ',' << format_real(r.reference) << ',' << format_real(r.abs_error) << ','
        << (r.cv_fraction ? format_real(*r.cv_fraction) : std::string()) << ',' << format_real(r.wall_seconds)
        << '\n';
  }
}

void write_references_csv(std::ostream& out, const std::vector<Reference>& references) {
  out << "# sensakit-references v1\n";
  out << "variable,family,parameter,n,value,source\n";
  for (const auto& r : references) {
    out << r.variable << ',' << to_string(r.family) << ',' << (r.parameter ? format_real(*r.parameter) : "") << ','
        << r.n << ',' << format_real(r.value) << ',' << r.source << '\n';
  }
}

void write_summary(std::ostream& out, const ExperimentResult& result) {
  const ExperimentPlan& p = result.plan;
  out << "experiment " << (p.name.empty() ? "<unnamed>" : p.name) << '\n';
  out << "  function " << p.function;
  if (!p.function_params.empty()) {
    out << '(';
    for (std::size_t i = 0; i < p.function_params.size(); ++i) out << (i ? ", " : "") << format_real(p.function_params[i]);
    out << ')';
  }
  out << ", law " << p.law << ", N " << p.N << ", N_ref " << p.N_ref << ", n_r " << p.n_r << ", seed " << p.seed
      << '\n';

  out << "\nreferences\n";
  for (const auto& r : result.references) {
    out << "  x" << r.variable << ' ' << to_string(r.family) << ' ' << fixed(r.value);
    if (r.parameter) out << "  (rho " << format_real(*r.parameter) << ")";
    out << "  [" << r.source << (r.n ? ", n=" + std::to_string(r.n) : std::string()) << "]\n";
  }

  struct Acc {
    std::size_t count = 0;
    double sum = 0.0, err = 0.0, lo = std::numeric_limits<double>::infinity(),
           hi = -std::numeric_limits<double>::infinity();
    std::size_t cv_count = 0;
    double cv = 0.0;
  };
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Acc> groups;  // variable, method order, L
  auto method_rank = [&](Method m) {
    return static_cast<std::size_t>(std::find(p.methods.begin(), p.methods.end(), m) - p.methods.begin());
  };
  for (const auto& r : result.records) {
    Acc& a = groups[{r.variable, method_rank(r.method), r.L}];
    ++a.count;
    a.sum += r.estimate;
    a.err += r.abs_error;
    a.lo = std::min(a.lo, r.estimate);
    a.hi = std::max(a.hi, r.estimate);
    if (r.cv_fraction) {
      ++a.cv_count;
      a.cv += *r.cv_fraction;
    }
  }
  out << "\nconvergence (over repetitions)\n";
  out << "  var  method       L      reps  mean_est    min_est     max_est     mean_abs_err  mean_cv_frac\n";
  for (const auto& [key, a] : groups) {
    const auto [var, mr, L] = key;
    char line[256];
    std::snprintf(line, sizeof line, "  x%-3zu %-11s %6zu %5zu  %10.6f  %10.6f  %10.6f  %12.6f  %s\n", var,
                  std::string(to_string(p.methods[mr])).c_str(), L, a.count, a.sum / a.count, a.lo, a.hi,
                  a.err / a.count, a.cv_count ? fixed(a.cv / a.cv_count, 4).c_str() : "-");
    out << line;
  }

  std::size_t poor = 0;
  for (const auto& n : result.notes) poor += n.rfind("poor surrogate", 0) == 0;
  out << "\nsurrogate fits flagged poor (cv fraction > " << fixed(kPoorFitFraction, 2) << "): " << poor << '\n';
  if (!result.notes.empty()) {
    out << "\nnotes\n";
    for (const auto& n : result.notes) out << "  " << n << '\n';
  }
}

void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create output directory " + dir.string() + ": " + ec.message());
  auto open = [&](const char* file) {
    std::ofstream f(dir / file);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + (dir / file).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, result.records);
  }
  {
    auto f = open("references.csv");
    write_references_csv(f, result.references);
  }
  {
    auto f = open("summary.txt");
    write_summary(f, result);
  }
}

}  // namespace sensakit
