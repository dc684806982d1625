#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "scfr/errors.hpp"
#include "scfr/spline_basis.hpp"

using namespace scfr;

TEST_CASE("knot vector construction") {
  SUBCASE("one interior knot") {
    const auto kv = KnotVector::build({0.5}, 0.0, 1.0);
    const std::vector<double> expect{0, 0, 0, 0, 0.5, 1, 1, 1, 1};
    CHECK(std::vector<double>(kv.augmented().begin(), kv.augmented().end()) == expect);
    CHECK(kv.basis_count() == 5);
  }
  SUBCASE("no interior knots") {
    const auto kv = KnotVector::build({}, 0.0, 1.0);
    const std::vector<double> expect{0, 0, 0, 0, 1, 1, 1, 1};
    CHECK(std::vector<double>(kv.augmented().begin(), kv.augmented().end()) == expect);
    CHECK(kv.basis_count() == 4);
  }
  SUBCASE("count formula") { CHECK(KnotVector::build({0.2, 0.8}, 0.0, 1.0).basis_count() == 6); }
  SUBCASE("degenerate domain") {
    CHECK_THROWS_AS(KnotVector::build({}, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(KnotVector::build({}, 2.0, 1.0), DomainError);
  }
  SUBCASE("interior knot outside the domain names its index") {
    try {
      KnotVector::build({0.5, 1.5}, 0.0, 1.0);
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("knot 1") != std::string::npos);
    }
    CHECK_THROWS_AS(KnotVector::build({0.0}, 0.0, 1.0), DomainError);
  }
}

TEST_CASE("basis values at known points") {
  const auto kv = KnotVector::build({}, 0.0, 1.0);
  const Eigen::VectorXd at0 = eval_basis(kv, 0.0);
  CHECK(at0[0] == 1.0);
  CHECK(at0.tail(3).isZero());

  // Single-span cubic B-splines are the Bernstein cubics.
  const auto bern = oracle::bernstein3(0.0, 1.0, 0.5);
  const Eigen::VectorXd mid = eval_basis(kv, 0.5);
  for (int k = 0; k < 4; ++k) CHECK(mid[k] == doctest::Approx(bern[k]).epsilon(1e-15));
  CHECK(bern[0] == 0.125);
  CHECK(bern[1] == 0.375);

  const Eigen::VectorXd at1 = eval_basis(kv, 1.0);
  CHECK(at1[3] == doctest::Approx(1.0));
}

TEST_CASE("basis agrees with the recursive definition") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double lo = -5.0 + 10.0 * unit(gen);
    const double hi = lo + 0.1 + 10.0 * unit(gen);
    const auto kv = KnotVector::build(oracle::random_interior(gen, lo, hi, 8), lo, hi);
    const std::vector<double> t(kv.augmented().begin(), kv.augmented().end());
    for (int s = 0; s < 5; ++s) {
      const double x = s == 4 ? hi : lo + (hi - lo) * unit(gen);
      const Eigen::VectorXd b = eval_basis(kv, x);
      for (int i = 0; i < kv.basis_count(); ++i) {
        CHECK(b[i] == doctest::Approx(oracle::cox_de_boor(t, i, 3, x)).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("partition of unity, nonnegativity and local support") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double lo = -100.0 + 200.0 * unit(gen);
    const double hi = lo + 1e-3 + 50.0 * unit(gen);
    const auto kv = KnotVector::build(oracle::random_interior(gen, lo, hi, 12), lo, hi);
    const double x = lo + (hi - lo) * unit(gen);
    const Eigen::VectorXd b = eval_basis(kv, x);
    CHECK(std::abs(b.sum() - 1.0) < 1e-9);
    CHECK(b.minCoeff() >= 0.0);
    const auto t = kv.augmented();
    for (int k = 0; k < kv.basis_count(); ++k) {
      if (x < t[k] || x > t[k + 4]) CHECK(b[k] == 0.0);
    }
  }
}

TEST_CASE("linear extension outside the domain is C1 at the boundary") {
  const auto kv = KnotVector::build({0.3, 0.45, 0.7}, 0.0, 1.0);
  const double h = 1e-6;
  for (double edge : {0.0, 1.0}) {
    const Eigen::VectorXd inside = eval_basis(kv, edge == 0.0 ? edge + h : edge - h);
    const Eigen::VectorXd at = eval_basis(kv, edge);
    const Eigen::VectorXd outside = eval_basis(kv, edge == 0.0 ? edge - h : edge + h);
    // continuity
    CHECK((outside - at).cwiseAbs().maxCoeff() < 1e-4);
    CHECK((inside - at).cwiseAbs().maxCoeff() < 1e-4);
    // one-sided slopes agree
    const Eigen::VectorXd slope_in = (at - inside) / (edge == 0.0 ? -h : h);
    const Eigen::VectorXd slope_out = (outside - at) / (edge == 0.0 ? -h : h);
    CHECK((slope_in - slope_out).cwiseAbs().maxCoeff() < 1e-4);
  }
  // Far outside, a spline term is a straight line.
  const Eigen::VectorXd a = eval_basis(kv, 3.0), b = eval_basis(kv, 5.0), c = eval_basis(kv, 7.0);
  CHECK(((c - b) - (b - a)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(eval_basis(kv, -40.0).sum() - 1.0) < 1e-9);
}

TEST_CASE("basis derivative matches finite differences") {
  const auto kv = KnotVector::build({0.2, 0.5, 0.55}, 0.0, 1.0);
  for (double x : {0.05, 0.3, 0.52, 0.9}) {
    const LocalBasis d = eval_local_derivative(kv, x);
    const Eigen::VectorXd fd = (eval_basis(kv, x + 1e-7) - eval_basis(kv, x - 1e-7)) / 2e-7;
    for (int k = 0; k < kSplineOrder; ++k) {
      CHECK(d.values[k] == doctest::Approx(fd[d.first + k]).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("design matrix layout") {
  const auto kv = KnotVector::build({}, 0.0, 1.0);
  SUBCASE("single row at the left edge") {
    Eigen::MatrixXd X(1, 1);
    X << 0.0;
    const std::vector<VariableBasis> bases{{0, kv}};
    const Eigen::MatrixXd B = design_matrix(X, bases);
    CHECK(B.rows() == 1);
    CHECK(B.cols() == 5);
    Eigen::RowVectorXd expect(5);
    expect << 1, 1, 0, 0, 0;
    CHECK(B.row(0).isApprox(expect));
  }
  SUBCASE("rows stack independently, blocks in order") {
    Eigen::MatrixXd X(2, 2);
    X << 0.0, 0.5, 1.0, 0.25;
    const std::vector<VariableBasis> bases{{0, kv}, {1, kv}};
    const Eigen::MatrixXd B = design_matrix(X, bases);
    CHECK(B.rows() == 2);
    CHECK(B.cols() == 9);
    CHECK(B.col(0).isOnes());
    CHECK(B.block(1, 1, 1, 4).isApprox(eval_basis(kv, 1.0).transpose()));
    CHECK(B.block(0, 5, 1, 4).isApprox(eval_basis(kv, 0.5).transpose()));
  }
  SUBCASE("variable index out of range") {
    Eigen::MatrixXd X(3, 1);
    X.setZero();
    const std::vector<VariableBasis> bases{{1, kv}};
    CHECK_THROWS_AS(design_matrix(X, bases), StructuralError);
  }
}

TEST_CASE("second-difference penalty") {
  SUBCASE("three coefficients by direct multiplication") {
    Eigen::MatrixXd D(1, 3);
    D << 1, -2, 1;
    CHECK(penalty_block(3).isApprox(D.transpose() * D));
    Eigen::Matrix3d expect;
    expect << 1, -2, 1, -2, 4, -2, 1, -2, 1;
    CHECK(penalty_block(3) == expect);
  }
  SUBCASE("rank equals the difference rows") {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(penalty_block(4));
    CHECK(lu.rank() == 2);
  }
  SUBCASE("null space holds affine sequences, nothing else") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (int nb = 3; nb < 12; ++nb) {
      const auto P = penalty_block(nb);
      CHECK(P.isApprox(P.transpose()));
      Eigen::VectorXd affine(nb);
      for (int k = 0; k < nb; ++k) affine[k] = 2.5 - 0.75 * k;
      CHECK(affine.dot(P * affine) == 0.0);
      Eigen::VectorXd bumped = affine;
      bumped[nb / 2] += 1e-3 + std::abs(nd(gen));
      CHECK(bumped.dot(P * bumped) > 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
  }
  SUBCASE("too few coefficients") { CHECK_THROWS_AS(penalty_block(2), StructuralError); }
}
