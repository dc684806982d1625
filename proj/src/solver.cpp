#include "scfr/solver.hpp"

#include <string>

#include "scfr/errors.hpp"

namespace scfr {

namespace {

void check_rows(Eigen::Index rows, const Eigen::VectorXd& y) {
  if (rows != y.size()) {
    throw StructuralError("design has " + std::to_string(rows) + " rows but target has " +
                          std::to_string(y.size()));
  }
  if (rows < 1) throw StructuralError("least squares needs at least one row");
}

// Adds lambda * P_j onto the diagonal blocks of `normal`, leaving the
// intercept (if any) unpenalized.
void add_penalties(Eigen::MatrixXd& normal, double lambda, std::span<const PenaltyBlock> penalties,
                   InterceptColumn intercept) {
  if (lambda < 0.0) throw InputError("smoothing weight lambda must be >= 0");
  Eigen::Index offset = intercept == InterceptColumn::kPresent ? 1 : 0;
  for (const auto& P : penalties) {
    if (P.rows() != P.cols() || offset + P.rows() > normal.rows()) {
      throw StructuralError("penalty blocks do not fit the design columns");
    }
    normal.block(offset, offset, P.rows(), P.cols()) += lambda * P;
    offset += P.rows();
  }
  if (offset != normal.rows()) {
    throw StructuralError("penalty blocks cover " + std::to_string(offset) + " of " +
                          std::to_string(normal.rows()) + " design columns");
  }
}

Eigen::VectorXd solve_normal(Eigen::MatrixXd normal, const Eigen::VectorXd& rhs) {
  normal.diagonal().array() += kNormalJitter;
  // Symmetric diagonal equilibration; the solved system is unchanged.
  const Eigen::VectorXd scale = normal.diagonal().cwiseSqrt().cwiseInverse();
  normal = scale.asDiagonal() * normal * scale.asDiagonal();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  Eigen::VectorXd beta = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * rhs);
  if (ldlt.info() != Eigen::Success || !beta.allFinite()) {
    throw NumericError("normal equations could not be solved");
  }
  return beta;
}

}  // namespace

Eigen::VectorXd least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  check_rows(A.rows(), y);
  if (A.cols() < 1) throw StructuralError("least squares needs at least one column");
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(A.cols(), A.cols());
  normal.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
  normal.triangularView<Eigen::Upper>() = normal.transpose();
  return solve_normal(std::move(normal), A.transpose() * y);
}

Eigen::VectorXd penalized_least_squares(const Eigen::MatrixXd& B, const Eigen::VectorXd& y,
                                        double lambda, std::span<const PenaltyBlock> penalties,
                                        InterceptColumn intercept) {
  check_rows(B.rows(), y);
  Eigen::MatrixXd normal = B.transpose() * B;
  add_penalties(normal, lambda, penalties, intercept);
  return solve_normal(std::move(normal), B.transpose() * y);
}

Eigen::VectorXd penalized_least_squares(const SparseRowMatrix& B, const Eigen::VectorXd& y,
                                        double lambda, std::span<const PenaltyBlock> penalties,
                                        InterceptColumn intercept) {
  check_rows(B.rows(), y);
  const Eigen::SparseMatrix<double> Bc = B;
  Eigen::MatrixXd normal = Eigen::MatrixXd(Bc.transpose() * Bc);
  add_penalties(normal, lambda, penalties, intercept);
  return solve_normal(std::move(normal), Bc.transpose() * y);
}

}  // namespace scfr
