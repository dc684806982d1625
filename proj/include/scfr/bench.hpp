#pragma once

// Repeated train/test benchmark: per-run splits, the spline continued
// fraction and the linear baseline, optional external prediction files, and
// the report CSVs.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scfr/cfr.hpp"
#include "scfr/data_io.hpp"
#include "scfr/evaluation.hpp"
#include "scfr/report.hpp"

namespace scfr {

inline constexpr const char* kCfrMethod = "spln-cfr";
inline constexpr const char* kLinearMethod = "l-regr";

struct ExperimentConfig {
  std::filesystem::path data;
  std::string target = kDefaultTarget;
  Protocol protocol = Protocol::kOutOfSample;
  int runs = 100;
  std::uint64_t base_seed = 0;
  FitConfig fit;
  double quantile = 0.9;
  double subsample = 0.5;
  bool minmax = false;  ///< scale features and target on the train split
  std::vector<std::filesystem::path> prediction_files;
  std::filesystem::path out_dir = "bench_out";
  int jobs = 1;

  void validate() const;
};

/// Outcome of one run: one report and one prediction set per method.
struct RunOutcome {
  int run_id = 0;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  double training_target_max = 0.0;
  int cfr_depth = 0;
  std::vector<RunReport> reports;
  std::vector<PredictionSet> predictions;
};

/// Split seed base_seed + run_id, fit both methods, score them.
RunOutcome run_single(const ExperimentConfig& config, const Dataset& ds, int run_id);

struct BenchResult {
  std::vector<RunOutcome> runs;
  std::vector<MethodPredictions> methods;  ///< built-in first, then external files
  std::vector<RunReport> reports;          ///< grouped by method, runs ascending
  std::vector<MethodAggregate> aggregates;
  RankMatrix ranks;
  RunThresholds thresholds;
};

/// Runs every seed (possibly on several threads) and joins external
/// predictions. A failing run aborts with its index and seed.
BenchResult run_benchmark(const ExperimentConfig& config, const Dataset& ds);

/// CSV bodies keyed by file name relative to the output directory.
std::vector<std::pair<std::string, std::string>> bench_outputs(const BenchResult& result);

/// Writes every output (temp file then rename) after all content is ready.
std::vector<std::filesystem::path> write_bench_outputs(const BenchResult& result,
                                                       const std::filesystem::path& out_dir);

}  // namespace scfr
