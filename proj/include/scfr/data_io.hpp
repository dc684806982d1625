#pragma once

// Tabular datasets, the synthetic tuning functions, min-max scaling and the
// two train/test protocols (random 2/3-1/3 and sorted-target 90/10).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scfr {

inline constexpr const char* kDefaultTarget = "critical_temp";

struct Dataset {
  Eigen::MatrixXd features;  ///< n x m
  Eigen::VectorXd target;    ///< n
  std::vector<std::string> feature_names;
  std::string target_name;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }

  Dataset select_rows(const std::vector<Eigen::Index>& rows) const;
};

/// Every non-target column becomes a feature, in file order. Throws
/// DataError naming the row and column of any missing or non-numeric cell.
Dataset load_csv(const std::filesystem::path& path, const std::string& target_column = kDefaultTarget);

/// Features in order, then the target as the last column.
std::string to_csv(const Dataset& ds);

enum class Protocol { kOutOfSample, kOutOfDomain };

const char* protocol_name(Protocol p);

struct SplitPair {
  Dataset train;
  Dataset test;
  Protocol protocol = Protocol::kOutOfSample;
  std::uint64_t seed = 0;
  /// Out-of-domain only: smallest target in the test pool.
  double threshold = 0.0;
  std::vector<Eigen::Index> train_rows;  ///< source row of each train sample
  std::vector<Eigen::Index> test_rows;
};

/// Seeded shuffle; the first floor(2n/3) rows train, the rest test.
SplitPair split_out_of_sample(const Dataset& ds, std::uint64_t seed);

/// Rows sorted by (target, row index); the lowest floor(quantile * n) form
/// the train pool and the rest the test pool, except that rows tied with the
/// first test-pool target move to the test pool so the pools never share a
/// target value. A seeded `subsample` fraction of each pool is returned.
SplitPair split_out_of_domain(const Dataset& ds, std::uint64_t seed, double quantile = 0.9,
                              double subsample = 0.5);

struct MinMaxParams {
  Eigen::VectorXd feature_min, feature_max;
  double target_min = 0.0, target_max = 0.0;
};

MinMaxParams minmax_fit(const Dataset& train);

/// (x - min) / (max - min) per column and for the target, without clamping.
/// Constant columns map to 0.
Dataset minmax_apply(const MinMaxParams& params, const Dataset& ds);

Eigen::VectorXd minmax_restore_target(const MinMaxParams& params, const Eigen::VectorXd& scaled);

struct SynthParams {
  int n = 200;
  double x_lo = 0.5;
  double x_hi = 6.0;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
};

/// y = Gamma(x) + N(0, noise_sd^2) on a uniform grid. Throws DataError if
/// the range touches a pole (a non-positive integer).
Dataset gen_gamma(const SynthParams& p);

/// y = sin(x)/x (1 at x = 0) + N(0, noise_sd^2) on a uniform grid.
Dataset gen_sinc(const SynthParams& p);

}  // namespace scfr
