#include <doctest.h>

#include <cmath>

#include "banditlab/design_state.hpp"
#include "banditlab/rng.hpp"

using namespace banditlab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("fresh state is the identity") {
  DesignState s(3);
  CHECK(s.lambda_mat().isApprox(MatrixXd::Identity(3, 3)));
  CHECK(s.inv_mat().isApprox(MatrixXd::Identity(3, 3)));
  CHECK(s.lambda_vec().isZero());
  CHECK(s.count() == 0);
  CHECK(s.log_det() == doctest::Approx(0.0));
}

TEST_CASE("zero dimension rejected") {
  CHECK_THROWS_AS(DesignState(0), DimensionError);
}

TEST_CASE("dimension mismatch rejected") {
  DesignState s(2);
  VectorXd x(3);
  x.setZero();
  CHECK_THROWS_AS(s.rank_one_update(x, 0.0), DimensionError);
  CHECK_THROWS_AS(s.quadratic_form(x), DimensionError);
}

TEST_CASE("coordinate update") {
  DesignState s(2);
  s.rank_one_update(vec2(1, 0), 0.0);
  MatrixXd expect(2, 2);
  expect << 2, 0, 0, 1;
  CHECK(s.lambda_mat().isApprox(expect));
  CHECK(s.lambda_vec().isZero());
  CHECK(s.count() == 1);
}

TEST_CASE("zero vector update only bumps count") {
  DesignState s(2);
  s.rank_one_update(vec2(0, 0), 5.0);
  CHECK(s.lambda_mat().isApprox(MatrixXd::Identity(2, 2)));
  CHECK(s.lambda_vec().isZero());
  CHECK(s.count() == 1);
}

TEST_CASE("diagonal-direction update matches matrix arithmetic") {
  DesignState s(2);
  const double r = 1.0 / std::sqrt(2.0);
  s.rank_one_update(vec2(r, r), 1.0);
  MatrixXd expect(2, 2);
  expect << 1.5, 0.5, 0.5, 1.5;
  CHECK(s.lambda_mat().isApprox(expect, 1e-14));
  CHECK(s.lambda_vec()(0) == doctest::Approx(r));
  CHECK(s.lambda_vec()(1) == doctest::Approx(r));
}

TEST_CASE("quadratic form scalar cases") {
  DesignState s(2);
  CHECK(s.quadratic_form(vec2(0, 1)) == doctest::Approx(1.0));
  CHECK(s.quadratic_form(vec2(0, 0)) == doctest::Approx(0.0));

  DesignState s1(1);
  VectorXd one = VectorXd::Ones(1);
  s1.rank_one_update(one, 0.0);
  CHECK(s1.quadratic_form(one) == doctest::Approx(0.5));
}

TEST_CASE("solve_theta oracles") {
  DesignState fresh(4);
  CHECK(fresh.solve_theta().isZero());

  DesignState s1(1);
  s1.rank_one_update(VectorXd::Ones(1), 3.0);
  CHECK(s1.solve_theta()(0) == doctest::Approx(1.5));

  DesignState s2(2);
  s2.rank_one_update(vec2(1, 0), 1.0);
  s2.rank_one_update(vec2(0, 1), -1.0);
  CHECK(s2.solve_theta()(0) == doctest::Approx(0.5));
  CHECK(s2.solve_theta()(1) == doctest::Approx(-0.5));
}

TEST_CASE("log_det oracles") {
  DesignState s1(1);
  s1.rank_one_update(VectorXd::Ones(1), 0.0);
  CHECK(s1.log_det() == doctest::Approx(std::log(2.0)));

  DesignState s2(2);
  s2.rank_one_update(vec2(1, 0), 0.0);
  s2.rank_one_update(vec2(0, 1), 0.0);
  CHECK(s2.log_det() == doctest::Approx(std::log(4.0)));
}

TEST_CASE("long random sequences keep every invariant") {
  Rng rng(2026);
  for (int trial = 0; trial < 5; ++trial) {
    int d = 2 + static_cast<int>(rng.next_index(6));
    DesignState s(d);
    VectorXd probe(d);
    for (int i = 0; i < d; ++i) probe[i] = rng.next_gaussian();
    probe.normalize();

    double prev_q = s.quadratic_form(probe);
    double prev_logdet = 0.0;
    double potential = 0.0;
    const int steps = 600;  // crosses the refactor period
    for (int t = 0; t < steps; ++t) {
      VectorXd x(d);
      for (int i = 0; i < d; ++i) x[i] = rng.next_gaussian();
      x /= std::max(1.0, x.norm());
      potential += s.quadratic_form(x);
      s.rank_one_update(x, rng.next_gaussian());

      CHECK(s.consistency_residual() <= DesignState::kConsistencyTol);
      double q = s.quadratic_form(probe);
      CHECK(q <= prev_q + 1e-10);
      prev_q = q;
      double ld = s.log_det();
      CHECK(ld >= prev_logdet - 1e-10);
      prev_logdet = ld;
    }
    CHECK(s.count() == static_cast<std::size_t>(steps));
    CHECK(potential <= 2.0 * s.log_det() + 1e-9);
    CHECK(s.log_det() <= d * std::log(steps + 1.0) + 1e-9);
    // Lambda - I stays PSD.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(
        s.lambda_mat() - MatrixXd::Identity(d, d));
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
  }
}
