#pragma once

// Clamped cubic B-spline bases, design matrices and second-difference
// penalties.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace scfr {

inline constexpr int kSplineDegree = 3;
inline constexpr int kSplineOrder = kSplineDegree + 1;

/// Knot positions closer than this are the same knot.
inline constexpr double kKnotDedupTolerance = 1e-12;

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Clamped cubic knot vector over [lo, hi].
///
/// The augmented vector repeats `lo` and `hi` degree+1 times around the
/// interior knots, giving `interior().size() + 4` basis functions.
class KnotVector {
 public:
  /// Throws DomainError when lo >= hi or an interior knot is not strictly
  /// inside (lo, hi), sorted and distinct.
  static KnotVector build(std::vector<double> interior, double lo, double hi);

  std::span<const double> interior() const { return interior_; }
  std::span<const double> augmented() const { return augmented_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int degree() const { return kSplineDegree; }
  int basis_count() const { return static_cast<int>(interior_.size()) + kSplineOrder; }

  /// Index of the knot span containing x, clamped to [degree, basis_count-1].
  int find_span(double x) const;

  bool operator==(const KnotVector&) const = default;

 private:
  KnotVector(std::vector<double> interior, double lo, double hi);

  std::vector<double> interior_;
  std::vector<double> augmented_;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

/// The (at most) four nonzero basis values at a point: basis functions
/// first, first+1, first+2, first+3.
struct LocalBasis {
  int first = 0;
  std::array<double, kSplineOrder> values{};
};

/// Nonzero basis values at x. Outside [lo, hi] every basis function is
/// extended linearly from the nearest boundary using its one-sided
/// derivative there, so spline terms extrapolate as straight lines.
LocalBasis eval_local(const KnotVector& kv, double x);

/// First derivatives of the nonzero basis functions at x in [lo, hi].
/// At hi the left derivative is returned.
LocalBasis eval_local_derivative(const KnotVector& kv, double x);

/// Dense basis vector of length basis_count.
Eigen::VectorXd eval_basis(const KnotVector& kv, double x);

/// One spline term: a feature column index plus its knot vector.
struct VariableBasis {
  int variable = 0;
  KnotVector knots;

  bool operator==(const VariableBasis&) const = default;
};

/// Total column count of design_matrix for these bases.
int design_width(std::span<const VariableBasis> bases);

/// n x (1 + sum basis_count) matrix: an intercept column followed by one
/// basis block per entry of `bases`, in order.
SparseRowMatrix design_matrix(const Eigen::MatrixXd& X, std::span<const VariableBasis> bases);

using PenaltyBlock = Eigen::MatrixXd;

/// D^T D for the (basis_count-2) x basis_count second-difference operator.
PenaltyBlock penalty_block(int basis_count);

}  // namespace scfr
