#pragma once

// Error metrics, threshold counts, inter-rater agreement and the
// cross-method aggregate/rank tables.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace scfr {

struct PredictionSet {
  std::string method_name;
  int run_id = 0;
  std::uint64_t seed = 0;
  std::vector<double> y_true;
  std::vector<double> y_pred;
};

struct RunReport {
  std::string method_name;
  int run_id = 0;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double mean_relative_error = 0.0;  ///< NaN when some true value is zero
  int p_count = 0;
  int n_count = 0;
  int beyond_training_max = 0;
  double threshold = 0.0;
  double fit_seconds = 0.0;
};

double rmse(std::span<const double> y_true, std::span<const double> y_pred);

/// mean(|pred - true| / |true|). Throws InputError naming the first index
/// with a zero true value.
double mean_relative_error(std::span<const double> y_true, std::span<const double> y_pred);

struct ThresholdCounts {
  int p_count = 0;  ///< predictions >= threshold
  int n_count = 0;
};

ThresholdCounts threshold_counts(std::span<const double> y_pred, double threshold);

/// Predictions strictly above the largest training target.
int count_beyond_training_max(std::span<const double> y_pred, double training_target_max);

/// Cohen's kappa for two binary labelings (true = P). When chance agreement
/// is 1 (both raters constant and identical) the result is 1.
double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b);

/// Agreement band of a kappa value, e.g. "substantial".
std::string kappa_label(double kappa);

std::vector<bool> positive_labels(std::span<const double> y_pred, double threshold);

struct TopKRow {
  std::size_t index = 0;
  double y_true = 0.0;
  double y_pred = 0.0;
};

struct TopKTable {
  std::vector<TopKRow> rows;  ///< sorted by y_pred descending, ties by index
  double mean_true = 0.0;
  double mean_pred = 0.0;
  double mean_relative_error = 0.0;  ///< NaN when some selected true value is zero
  double rmse = 0.0;
};

TopKTable top_k_table(const PredictionSet& set, std::size_t k = 20);

struct MethodAggregate {
  std::string method_name;
  int runs = 0;
  double median_rmse = 0.0;
  double std_rmse = 0.0;  ///< population standard deviation
};

double median(std::vector<double> values);
double population_std(std::span<const double> values);

/// One row per method, in order of first appearance. Throws InputError when
/// methods have different run counts.
std::vector<MethodAggregate> aggregate(std::span<const RunReport> reports);

struct RankMatrix {
  std::vector<std::string> methods;
  std::vector<int> run_ids;
  std::vector<std::vector<double>> ranks;  ///< [run][method]; 1 = lowest RMSE, ties averaged
};

RankMatrix rank_matrix(std::span<const RunReport> reports);

/// Ranks with ties sharing their average position (1-based, ascending).
std::vector<double> average_ranks(std::span<const double> values);

/// Prediction files: header run_id,row_id,y_true,y_pred.
std::string prediction_csv(std::span<const PredictionSet> sets);

/// One PredictionSet per run_id in file order; method name from the file
/// stem unless `method_name` is given.
std::vector<PredictionSet> read_prediction_file(const std::filesystem::path& path,
                                                const std::string& method_name = "");

}  // namespace scfr
