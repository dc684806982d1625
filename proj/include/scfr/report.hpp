#pragma once

// Cross-method comparison tables built from prediction sets: threshold
// P/N counts, pairwise Cohen's kappa and top-k listings.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scfr/evaluation.hpp"

namespace scfr {

/// Prediction sets of one method, one per run.
struct MethodPredictions {
  std::string method_name;
  std::vector<PredictionSet> runs;
};

/// Per-run thresholds keyed by run_id.
using RunThresholds = std::map<int, double>;

/// Throws InputError when two methods disagree on the run ids present or on
/// the true values of a shared run (tolerance 1e-9 relative).
void check_consistent(const std::vector<MethodPredictions>& methods);

/// method,p_count,n_count summed over every run.
std::string pn_table_csv(const std::vector<MethodPredictions>& methods,
                         const RunThresholds& thresholds);

/// method_a,method_b,kappa,agreement for every unordered pair, with labels
/// pooled over all runs. Header only for fewer than two methods.
std::string kappa_table_csv(const std::vector<MethodPredictions>& methods,
                            const RunThresholds& thresholds);

/// Rows method,rank,row_id,y_true,y_pred and a summary block per method.
struct TopKCsv {
  std::string rows;
  std::string summary;
};

TopKCsv top_k_csv(const std::vector<MethodPredictions>& methods, std::size_t k,
                  std::optional<int> run_id);

struct ReportConfig {
  std::optional<std::filesystem::path> runs_csv;  ///< bench runs.csv supplying thresholds
  std::vector<std::filesystem::path> prediction_files;
  std::optional<double> threshold;  ///< overrides thresholds from runs_csv
  std::size_t top_k = 20;
  std::optional<int> run_id;  ///< run used for the top-k table; first run when unset
  std::filesystem::path out_dir;
};

/// Reads inputs and writes topk.csv, topk_summary.csv, pn_table.csv and
/// kappa.csv into out_dir. Returns the written paths.
std::vector<std::filesystem::path> run_report(const ReportConfig& config);

/// Thresholds from a bench runs.csv (run_id and threshold columns).
RunThresholds read_run_thresholds(const std::filesystem::path& runs_csv);

}  // namespace scfr
