#include "scfr/cfr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "scfr/errors.hpp"
#include "scfr/solver.hpp"

namespace scfr {

namespace {

bool is_negative(double r) { return r < 0.0; }

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Denominator magnitudes below `floor` are replaced by floor with the
// original sign (zero counts as positive).
double guard_denominator(double den, double floor) {
  if (std::abs(den) >= floor) return den;
  return std::signbit(den) && den != 0.0 ? -floor : floor;
}

// Adds X(p, j) for each selected sample p to the knot set of variable j,
// skipping positions on the domain boundary and within the dedup tolerance
// of a knot already present.
void accumulate_knots(std::vector<double>& knots, const Eigen::MatrixXd& X, int j,
                      std::span<const int> samples, const FeatureBounds& bounds) {
  for (int p : samples) {
    const double v = X(p, j);
    if (!(v > bounds.lo && v < bounds.hi)) continue;
    const auto close = [v](double t) { return std::abs(t - v) <= kKnotDedupTolerance; };
    if (std::any_of(knots.begin(), knots.end(), close)) continue;
    knots.push_back(v);
  }
  std::sort(knots.begin(), knots.end());
}

double rmse_of(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace

void FitConfig::validate() const {
  if (!(lambda >= 0.0)) throw InputError("lambda must be >= 0");
  if (knots_per_depth < 1) throw InputError("knots per depth must be >= 1");
  if (!(norm > 0.0)) throw InputError("norm must be > 0");
  if (max_depth < 0) throw InputError("max depth must be >= 0");
  if (!(offset_epsilon > 0.0)) throw InputError("offset epsilon must be > 0");
  if (!(offset_scale >= 0.0)) throw InputError("offset scale must be >= 0");
  if (!(denom_floor > 0.0)) throw InputError("denominator floor must be > 0");
}

Eigen::VectorXd LinearModel::evaluate(const Eigen::MatrixXd& X) const {
  if (X.cols() + 1 != coefficients.size()) {
    throw StructuralError("linear layer expects " + std::to_string(coefficients.size() - 1) +
                          " features, got " + std::to_string(X.cols()));
  }
  Eigen::VectorXd out = X * coefficients.tail(X.cols());
  out.array() += coefficients[0];
  return out;
}

Eigen::VectorXd AdditiveSplineModel::evaluate(const Eigen::MatrixXd& X) const {
  return design_matrix(X, bases) * coefficients;
}

Eigen::VectorXd DepthLayer::evaluate(const Eigen::MatrixXd& X) const {
  return std::visit([&](const auto& m) { return m.evaluate(X); }, model);
}

Eigen::MatrixXd CFracModel::predict_all_depths(const Eigen::MatrixXd& X) const {
  if (X.cols() != feature_count()) {
    throw StructuralError("model expects " + std::to_string(feature_count()) +
                          " features, got " + std::to_string(X.cols()));
  }
  if (layers.empty()) throw StructuralError("model has no layers");
  const int d_max = depth();
  Eigen::MatrixXd g(X.rows(), d_max + 1);
  for (int i = 0; i <= d_max; ++i) g.col(i) = layers[i].evaluate(X);

  Eigen::MatrixXd out(X.rows(), d_max + 1);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    for (int d = 0; d <= d_max; ++d) {
      double value = g(r, d);
      if (literal_final_offset) value -= layers[d].offset;
      for (int i = d - 1; i >= 0; --i) {
        value = g(r, i) - layers[i].offset + 1.0 / guard_denominator(value, denom_floor);
      }
      out(r, d) = norm * value;
    }
  }
  return out;
}

Eigen::VectorXd CFracModel::predict(const Eigen::MatrixXd& X) const {
  return predict_all_depths(X).col(depth());
}

CFracModel CFracModel::truncated(int d) const {
  if (d < 0 || d > depth()) {
    throw InputError("truncation depth " + std::to_string(d) + " outside 0.." +
                     std::to_string(depth()));
  }
  CFracModel out = *this;
  out.layers.resize(static_cast<std::size_t>(d) + 1);
  return out;
}

std::vector<int> select_knots(std::span<const double> residuals, int k) {
  std::vector<int> order(residuals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(residuals[a]) > std::abs(residuals[b]);
  });
  std::vector<int> picked;
  for (int idx : order) {
    if (static_cast<int>(picked.size()) >= k) break;
    if (picked.empty() || is_negative(residuals[idx]) != is_negative(residuals[picked.back()])) {
      picked.push_back(idx);
    }
  }
  return picked;
}

double compute_offset(std::span<const double> residuals, double offset_epsilon,
                      double offset_scale) {
  if (residuals.empty()) return offset_epsilon;
  const auto [lo, hi] = std::minmax_element(residuals.begin(), residuals.end());
  return std::abs(*lo) + std::max(offset_epsilon, offset_scale * (*hi - *lo));
}

LinearModel fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) {
    throw StructuralError("feature matrix has " + std::to_string(X.rows()) +
                          " rows but target has " + std::to_string(y.size()));
  }
  std::vector<Eigen::Index> varying;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (X.col(j).minCoeff() < X.col(j).maxCoeff()) varying.push_back(j);
  }
  Eigen::MatrixXd A(X.rows(), static_cast<Eigen::Index>(varying.size()) + 1);
  A.col(0).setOnes();
  for (std::size_t k = 0; k < varying.size(); ++k) A.col(static_cast<Eigen::Index>(k) + 1) = X.col(varying[k]);
  const Eigen::VectorXd beta = least_squares(A, y);
  LinearModel out{Eigen::VectorXd::Zero(X.cols() + 1)};
  out.coefficients[0] = beta[0];
  for (std::size_t k = 0; k < varying.size(); ++k) {
    out.coefficients[varying[k] + 1] = beta[static_cast<Eigen::Index>(k) + 1];
  }
  return out;
}

FitResult fit_traced(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config,
                     std::uint64_t /*rng_seed*/) {
  config.validate();
  if (X.rows() != y.size()) {
    throw StructuralError("feature matrix has " + std::to_string(X.rows()) +
                          " rows but target has " + std::to_string(y.size()));
  }
  if (X.rows() < 2) throw DataError("fit needs at least 2 samples");
  if (!X.allFinite() || !y.allFinite()) throw DataError("fit inputs must be finite");

  using Clock = std::chrono::steady_clock;
  const auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  const int m = static_cast<int>(X.cols());
  FitResult result;
  CFracModel& model = result.model;
  model.norm = config.norm;
  model.denom_floor = config.denom_floor;
  model.literal_final_offset = config.literal_final_offset;
  model.training_target_max = y.maxCoeff();
  model.feature_bounds.resize(m);
  for (int j = 0; j < m; ++j) model.feature_bounds[j] = {X.col(j).minCoeff(), X.col(j).maxCoeff()};

  std::vector<double> seconds;
  auto t0 = Clock::now();
  const Eigen::VectorXd y0 = y / config.norm;
  LinearModel linear = fit_linear(X, y0);
  Eigen::VectorXd residual = y0 - linear.evaluate(X);
  double offset = compute_offset(view(residual), config.offset_epsilon, config.offset_scale);
  model.layers.push_back({std::move(linear), offset});
  seconds.push_back(seconds_since(t0));

  std::vector<std::vector<double>> knots(m);
  std::vector<int> knot_counts{0};
  for (int depth = 1; depth <= config.max_depth; ++depth) {
    t0 = Clock::now();
    const Eigen::VectorXd target = (residual.array() + offset).inverse().matrix();
    const auto samples = select_knots(view(residual), config.knots_per_depth);

    AdditiveSplineModel spline;
    std::vector<PenaltyBlock> penalties;
    int knot_total = 0;
    for (int j = 0; j < m; ++j) {
      const FeatureBounds& b = model.feature_bounds[j];
      if (!(b.lo < b.hi)) continue;  // constant column: intercept only
      accumulate_knots(knots[j], X, j, samples, b);
      knot_total += static_cast<int>(knots[j].size());
      spline.bases.push_back({j, KnotVector::build(knots[j], b.lo, b.hi)});
      penalties.push_back(penalty_block(spline.bases.back().knots.basis_count()));
    }
    const SparseRowMatrix B = design_matrix(X, spline.bases);
    spline.coefficients = penalized_least_squares(B, target, config.lambda, penalties);
    const Eigen::VectorXd fitted = B * spline.coefficients;
    if (!fitted.allFinite()) {
      throw NumericError("non-finite fit at depth " + std::to_string(depth));
    }
    residual = target - fitted;
    offset = compute_offset(view(residual), config.offset_epsilon, config.offset_scale);
    model.layers.push_back({std::move(spline), offset});
    knot_counts.push_back(knot_total);
    seconds.push_back(seconds_since(t0));
  }

  const Eigen::MatrixXd all = model.predict_all_depths(X);
  std::vector<double> rmse(all.cols());
  for (Eigen::Index d = 0; d < all.cols(); ++d) {
    rmse[d] = rmse_of(all.col(d), y);
    result.trace.push_back({static_cast<int>(d), rmse[d], knot_counts[d],
                            model.layers[d].offset, seconds[d]});
  }
  result.chosen_depth = config.auto_depth ? select_truncation_depth(rmse) : model.depth();
  if (result.chosen_depth != model.depth()) model = model.truncated(result.chosen_depth);
  return result;
}

CFracModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& config,
               std::uint64_t rng_seed) {
  return fit_traced(X, y, config, rng_seed).model;
}

int select_truncation_depth(std::span<const double> rmse_by_depth) {
  if (rmse_by_depth.empty()) throw InputError("no depths to choose from");
  for (std::size_t d = 0; d + 1 < rmse_by_depth.size(); ++d) {
    if (rmse_by_depth[d + 1] > rmse_by_depth[d]) return static_cast<int>(d);
  }
  return static_cast<int>(rmse_by_depth.size()) - 1;
}

double training_rmse(const CFracModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return rmse_of(model.predict(X), y);
}

std::vector<double> rmse_by_depth(const CFracModel& model, const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y) {
  if (X.rows() != y.size() || y.size() == 0) {
    throw StructuralError("rmse_by_depth needs matching nonempty X and y");
  }
  const Eigen::MatrixXd all = model.predict_all_depths(X);
  std::vector<double> out(all.cols());
  for (Eigen::Index d = 0; d < all.cols(); ++d) out[d] = rmse_of(all.col(d), y);
  return out;
}

CFracModel auto_depth_truncate(const CFracModel& model, const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y) {
  return model.truncated(select_truncation_depth(rmse_by_depth(model, X, y)));
}

}  // namespace scfr
