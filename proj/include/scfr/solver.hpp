#pragma once

// Ordinary and penalized linear least squares.
//
// Every solve works on the normal equations with a fixed ridge jitter of
// kNormalJitter * I, so collinear or empty columns never make the system
// singular.

#include <span>

#include <Eigen/Dense>

#include "scfr/spline_basis.hpp"

namespace scfr {

inline constexpr double kNormalJitter = 1e-10;

/// Solves (A^T A + jitter I) beta = A^T y.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y);

/// Whether column 0 of the design is an unpenalized intercept.
enum class InterceptColumn { kPresent, kAbsent };

/// Solves (B^T B + lambda * blockdiag(0, P_1, ..., P_m) + jitter I) beta = B^T y.
///
/// The penalty blocks tile the non-intercept columns of B in order; with
/// InterceptColumn::kAbsent they tile every column.
Eigen::VectorXd penalized_least_squares(const Eigen::MatrixXd& B, const Eigen::VectorXd& y,
                                        double lambda, std::span<const PenaltyBlock> penalties,
                                        InterceptColumn intercept = InterceptColumn::kPresent);

Eigen::VectorXd penalized_least_squares(const SparseRowMatrix& B, const Eigen::VectorXd& y,
                                        double lambda, std::span<const PenaltyBlock> penalties,
                                        InterceptColumn intercept = InterceptColumn::kPresent);

}  // namespace scfr
