#include "scfr/spline_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scfr/errors.hpp"

namespace scfr {

namespace {

// Cox-de Boor triangle for the degree+1 nonzero basis functions of the
// given degree on `span` (de Boor / Piegl-Tiller A2.2).
template <int Degree>
std::array<double, Degree + 1> basis_funs(std::span<const double> U, int span, double x) {
  std::array<double, Degree + 1> N{};
  std::array<double, Degree + 1> left{};
  std::array<double, Degree + 1> right{};
  N[0] = 1.0;
  for (int j = 1; j <= Degree; ++j) {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom == 0.0 ? 0.0 : N[r] / denom;
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  return N;
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

KnotVector::KnotVector(std::vector<double> interior, double lo, double hi)
    : interior_(std::move(interior)), lo_(lo), hi_(hi) {
  augmented_.reserve(interior_.size() + 2 * kSplineOrder);
  augmented_.insert(augmented_.end(), kSplineOrder, lo_);
  augmented_.insert(augmented_.end(), interior_.begin(), interior_.end());
  augmented_.insert(augmented_.end(), kSplineOrder, hi_);
}

KnotVector KnotVector::build(std::vector<double> interior, double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi)) {
    throw DomainError("degenerate spline domain: lo=" + std::to_string(lo) +
                      " hi=" + std::to_string(hi));
  }
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const double t = interior[i];
    if (!(t > lo && t < hi)) {
      throw DomainError("interior knot " + std::to_string(i) + " (" + std::to_string(t) +
                        ") outside (lo, hi)");
    }
    if (i > 0 && !(t > interior[i - 1])) {
      throw DomainError("interior knot " + std::to_string(i) +
                        " is not strictly greater than its predecessor");
    }
  }
  return KnotVector(std::move(interior), lo, hi);
}

int KnotVector::find_span(double x) const {
  const int last = basis_count() - 1;
  if (x >= augmented_[last + 1]) return last;
  if (x <= augmented_[kSplineDegree]) return kSplineDegree;
  // Largest span with augmented[span] <= x.
  const auto it = std::upper_bound(augmented_.begin() + kSplineDegree,
                                   augmented_.begin() + last + 1, x);
  return static_cast<int>(it - augmented_.begin()) - 1;
}

LocalBasis eval_local_derivative(const KnotVector& kv, double x) {
  const auto U = kv.augmented();
  const double xc = std::clamp(x, kv.lo(), kv.hi());
  const int span = kv.find_span(xc);
  const auto lower = basis_funs<kSplineDegree - 1>(U, span, xc);
  // lower[r] is N_{span-2+r, 2}; N_{i,2} vanishes outside that window.
  auto quad = [&](int i) {
    const int r = i - (span - (kSplineDegree - 1));
    return (r < 0 || r > kSplineDegree - 1) ? 0.0 : lower[r];
  };
  LocalBasis out;
  out.first = span - kSplineDegree;
  for (int k = 0; k < kSplineOrder; ++k) {
    const int i = out.first + k;
    out.values[k] = kSplineDegree * safe_ratio(quad(i), U[i + kSplineDegree] - U[i]) -
                    kSplineDegree * safe_ratio(quad(i + 1), U[i + kSplineDegree + 1] - U[i + 1]);
  }
  return out;
}

LocalBasis eval_local(const KnotVector& kv, double x) {
  const auto U = kv.augmented();
  if (x < kv.lo() || x > kv.hi()) {
    const double edge = x < kv.lo() ? kv.lo() : kv.hi();
    const int span = kv.find_span(edge);
    const auto at_edge = basis_funs<kSplineDegree>(U, span, edge);
    const LocalBasis slope = eval_local_derivative(kv, edge);
    LocalBasis out;
    out.first = span - kSplineDegree;
    for (int k = 0; k < kSplineOrder; ++k) {
      out.values[k] = at_edge[k] + slope.values[k] * (x - edge);
    }
    return out;
  }
  const int span = kv.find_span(x);
  LocalBasis out;
  out.first = span - kSplineDegree;
  out.values = basis_funs<kSplineDegree>(U, span, x);
  return out;
}

Eigen::VectorXd eval_basis(const KnotVector& kv, double x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(kv.basis_count());
  const LocalBasis local = eval_local(kv, x);
  for (int k = 0; k < kSplineOrder; ++k) out[local.first + k] = local.values[k];
  return out;
}

int design_width(std::span<const VariableBasis> bases) {
  int width = 1;
  for (const auto& b : bases) width += b.knots.basis_count();
  return width;
}

SparseRowMatrix design_matrix(const Eigen::MatrixXd& X, std::span<const VariableBasis> bases) {
  for (const auto& b : bases) {
    if (b.variable < 0 || b.variable >= X.cols()) {
      throw StructuralError("spline term refers to variable " + std::to_string(b.variable) +
                            " but the matrix has " + std::to_string(X.cols()) + " columns");
    }
  }
  const Eigen::Index n = X.rows();
  SparseRowMatrix B(n, design_width(bases));
  B.reserve(Eigen::VectorXi::Constant(n, 1 + kSplineOrder * static_cast<int>(bases.size())));
  for (Eigen::Index i = 0; i < n; ++i) {
    B.insert(i, 0) = 1.0;
    int offset = 1;
    for (const auto& b : bases) {
      const LocalBasis local = eval_local(b.knots, X(i, b.variable));
      for (int k = 0; k < kSplineOrder; ++k) {
        B.insert(i, offset + local.first + k) = local.values[k];
      }
      offset += b.knots.basis_count();
    }
  }
  B.makeCompressed();
  return B;
}

PenaltyBlock penalty_block(int basis_count) {
  if (basis_count < 3) {
    throw StructuralError("second-difference penalty needs at least 3 coefficients, got " +
                          std::to_string(basis_count));
  }
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(basis_count - 2, basis_count);
  for (int r = 0; r < basis_count - 2; ++r) {
    D(r, r) = 1.0;
    D(r, r + 1) = -2.0;
    D(r, r + 2) = 1.0;
  }
  return D.transpose() * D;
}

}  // namespace scfr
