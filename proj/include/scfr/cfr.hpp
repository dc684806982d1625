#pragma once

// Spline continued fraction regression.
//
// The fitted model is
//
//   norm * [ g0(x) - C0 + 1 / (g1(x) - C1 + 1 / ( ... + 1 / gd(x))) ]
//
// where g0 is linear and every deeper gi is an additive penalized cubic
// spline model. Each depth is fit to the reciprocal of the shifted
// residual of the depth above it; knots are placed at high-residual
// samples with alternating residual signs and accumulate across depths.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "scfr/spline_basis.hpp"

namespace scfr {

struct FitConfig {
  double lambda = 0.5;        ///< smoothing weight on the second-difference penalties
  int knots_per_depth = 5;    ///< new knots selected per depth
  double norm = 1000.0;       ///< targets are divided by this before fitting
  int max_depth = 5;
  bool auto_depth = false;    ///< truncate at the first training-RMSE increase
  double offset_epsilon = 1e-3;  ///< smallest shifted residual; bounds targets by 1/offset_epsilon
  /// Extra shift as a multiple of the residual range, keeping the next
  /// depth's targets within a factor (1 + offset_scale) / offset_scale.
  double offset_scale = 1.0;
  double denom_floor = 1e-6;     ///< smallest denominator magnitude at prediction time
  /// Subtract the deepest layer's offset as well (the unreduced formula).
  bool literal_final_offset = false;

  /// Throws InputError on out-of-range fields.
  void validate() const;
};

/// g0: intercept followed by one weight per feature column.
struct LinearModel {
  Eigen::VectorXd coefficients;

  Eigen::VectorXd evaluate(const Eigen::MatrixXd& X) const;
};

/// Intercept plus one univariate spline per non-constant feature.
struct AdditiveSplineModel {
  std::vector<VariableBasis> bases;
  Eigen::VectorXd coefficients;  ///< intercept, then one block per basis

  Eigen::VectorXd evaluate(const Eigen::MatrixXd& X) const;
};

struct DepthLayer {
  std::variant<LinearModel, AdditiveSplineModel> model;
  double offset = 0.0;  ///< C_i, the shift applied to this layer's residuals

  Eigen::VectorXd evaluate(const Eigen::MatrixXd& X) const;
  bool is_linear() const { return std::holds_alternative<LinearModel>(model); }
};

struct FeatureBounds {
  double lo = 0.0;
  double hi = 0.0;
};

class CFracModel {
 public:
  double norm = 1.0;
  double denom_floor = 1e-6;
  bool literal_final_offset = false;
  std::vector<DepthLayer> layers;
  std::vector<FeatureBounds> feature_bounds;
  std::vector<std::string> feature_names;  ///< may be empty (positional features)
  double training_target_max = 0.0;

  /// Deepest layer index.
  int depth() const { return static_cast<int>(layers.size()) - 1; }
  int feature_count() const { return static_cast<int>(feature_bounds.size()); }

  /// Throws StructuralError when X has the wrong column count.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

  /// Copy keeping layers 0..depth.
  CFracModel truncated(int depth) const;

  /// Predictions of every truncation 0..depth() from one pass of layer
  /// evaluations; column d holds the depth-d truncation.
  Eigen::MatrixXd predict_all_depths(const Eigen::MatrixXd& X) const;
};

/// Indices of up to k samples: the largest |residual| first, then each next
/// largest whose sign differs from the previously accepted one. Zero counts
/// as positive; equal magnitudes go to the lower index.
std::vector<int> select_knots(std::span<const double> residuals, int k);

/// |min residual| + max(offset_epsilon, offset_scale * (max - min residual)).
/// With offset_scale = 0 this is |min residual| + offset_epsilon.
double compute_offset(std::span<const double> residuals, double offset_epsilon,
                      double offset_scale = 0.0);

/// Ordinary least squares with an intercept. Constant columns get weight 0,
/// so predictions do not depend on them.
LinearModel fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Per-depth diagnostics gathered during fit.
struct DepthTrace {
  int depth = 0;
  double train_rmse = 0.0;  ///< RMSE of the depth-d truncation, original target units
  int knot_count = 0;       ///< interior knots summed over variables
  double offset = 0.0;
  double seconds = 0.0;     ///< wall clock spent fitting this layer
};

struct FitResult {
  CFracModel model;
  std::vector<DepthTrace> trace;
  int chosen_depth = 0;
};

/// Fits a model to depth config.max_depth (then truncates when
/// config.auto_depth). The algorithm is deterministic; `rng_seed` is
/// accepted for interface stability and not consumed.
FitResult fit_traced(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config,
                     std::uint64_t rng_seed = 0);

CFracModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config,
               std::uint64_t rng_seed = 0);

/// Smallest depth d with rmse[d+1] > rmse[d]; the last depth when the
/// sequence never increases.
int select_truncation_depth(std::span<const double> rmse_by_depth);

double training_rmse(const CFracModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Training RMSE of every truncation 0..depth().
std::vector<double> rmse_by_depth(const CFracModel& model, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y);

CFracModel auto_depth_truncate(const CFracModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y);

/// Model document (JSON). Reals are written with round-trip precision.
std::string serialize(const CFracModel& model);

/// Throws ParseError naming the byte offset or the offending key.
CFracModel deserialize(const std::string& document);

}  // namespace scfr
