#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sensakit/estimate.hpp"
#include "sensakit/mst.hpp"
#include "sensakit/plan.hpp"

namespace sensakit {

enum class Family { kde, mst };
std::string_view to_string(Family f) noexcept;
Family family_of(Method m) noexcept;

/// Seed of the beta calibrations used by experiments. Fixed so that one
/// cache file serves every plan.
inline constexpr std::uint64_t kDefaultBetaSeed = 1;

struct Reference {
  std::size_t variable = 1;
  Family family = Family::mst;
  double value = 0.0;
  std::size_t n = 0;                    // 0 for closed-form values
  std::optional<double> parameter;      // correlation for binormal cases
  std::string source;
};

struct ConvergenceRecord {
  std::size_t variable = 1;
  Method method = Method::sample_kde;
  std::size_t L = 0;
  std::size_t repetition = 0;
  double estimate = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  std::optional<double> cv_fraction;
  double wall_seconds = 0.0;
};

struct RunOptions {
  int threads = 0;  // 0: all available
  /// Record wall-clock times. Off by default so record files are
  /// byte-identical across runs.
  bool timing = false;
  BetaCache* beta_cache = nullptr;
  std::size_t beta_reps = kDefaultBetaReps;
  std::uint64_t beta_seed = kDefaultBetaSeed;
  BetaSample beta_sample = kEstimatorBetaSample;
  std::size_t gp_restarts = 10;
  std::size_t cv_folds = 10;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

/// Fit quality above this SS_res / SS_tot is flagged as a poor surrogate.
inline constexpr double kPoorFitFraction = 0.5;

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<Reference> references;
  std::vector<ConvergenceRecord> records;
  std::vector<std::string> notes;
};

/// Large-sample references with the true model: KDE and/or MST, whichever
/// the plan's methods need. Binormal cases use the closed form.
std::vector<Reference> run_reference(const ExperimentPlan& plan, const RunOptions& options = {});

/// All (repetition, L) tasks of the plan; records come back ordered by
/// repetition, L, method (plan order) and variable. `notes` collects
/// skipped methods and flagged fits.
std::vector<ConvergenceRecord> run_plan(const ExperimentPlan& plan, const std::vector<Reference>& references,
                                        const RunOptions& options = {}, std::vector<std::string>* notes = nullptr);

ExperimentResult run_experiment(const ExperimentPlan& plan, const RunOptions& options = {});

void write_records_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records);
void write_references_csv(std::ostream& out, const std::vector<Reference>& references);
void write_summary(std::ostream& out, const ExperimentResult& result);
/// records.csv, references.csv and summary.txt inside `dir` (created).
void write_experiment(const std::filesystem::path& dir, const ExperimentResult& result);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

}  // namespace sensakit
