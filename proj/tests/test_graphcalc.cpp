#include "anw/graphcalc.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace anw;

TEST_CASE("frozen adjacency values") {
  // mpmath: 2 + sech(15), tanh(10)/3
  const auto a = adjacency_matrices<double>(3, 0.025, 15.0 / 0.1);
  CHECK(approximation_error(a) == doctest::Approx(2.000000611804641).epsilon(1e-15));
  const auto b = adjacency_matrices<double>(3, 0.025, 10.0 / 0.1);
  CHECK(b.v(0, 0) == doctest::Approx(0.333333331959231).epsilon(1e-14));
  CHECK(b.v(0, 1) == doctest::Approx(-0.333333331959231).epsilon(1e-14));
}

TEST_CASE("closed form equals the graph extracted from the covariance") {
  test::Gen gen(51);
  for (int trial = 0; trial < 40; ++trial) {
    const int l = gen.integer(1, 10);
    const double eta = 0.025, z = gen.uniform(0, 60);
    const auto closed = adjacency_matrices<double>(l, eta, z);
    const auto derived = detail::graph_from_covariance(large_coupling_covariance<double>(l, eta, z));
    CAPTURE(l);
    CAPTURE(z);
    CHECK((closed.u - derived.u).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((closed.v - derived.v).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("trace of U approaches l-1") {
  for (int l = 1; l <= 10; ++l) {
    const double eta = 0.025;
    for (double t : {0.0, 1.0, 5.0, 20.0}) {
      const auto a = adjacency_matrices<double>(l, eta, t / (4 * eta));
      CHECK(approximation_error(a) == doctest::Approx(l - 1 + 1 / std::cosh(t)).epsilon(1e-14));
    }
    const auto far = adjacency_matrices<double>(l, eta, 20 / (4 * eta));
    CHECK(std::abs(approximation_error(far) - (l - 1)) < 1e-6);
    CHECK((far.v - v_infinity<double>(l)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("U and V are symmetric; U is positive definite") {
  test::Gen gen(52);
  for (int trial = 0; trial < 20; ++trial) {
    const int l = gen.integer(1, 12);
    const auto a = adjacency_matrices<double>(l, gen.uniform(0, 0.1), gen.uniform(0, 100));
    CHECK((a.u - a.u.transpose()).norm() == 0.0);
    CHECK((a.v - a.v.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.u);
    CHECK(es.eigenvalues().minCoeff() > 0);
  }
}

TEST_CASE("cluster verdict") {
  const auto v = cluster_limit_verdict(6, 0.025, {0.0, 10.0, 100.0, 200.0});
  CHECK(v.limit == 5.0);
  CHECK_FALSE(v.cluster_state);
  REQUIRE(v.trace.size() == 4);
  CHECK(v.trace[0] == doctest::Approx(6.0));
  for (std::size_t i = 1; i < v.trace.size(); ++i) CHECK(v.trace[i] < v.trace[i - 1]);
  CHECK_THROWS_AS(cluster_limit_verdict(6, 0.025, {1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(adjacency_matrices<double>(0, 0.025, 1.0), ValidationError);
}

TEST_CASE("local phase shifts cannot push tr U below l-1") {
  for (int l = 2; l <= 5; ++l) {
    const auto res = local_phase_search(l, 0.025, 100.0, M_PI / 12);
    CAPTURE(l);
    CHECK(res.exhaustive);
    CHECK(res.min_trace >= l - 1 - 1e-9);
    CHECK(res.min_trace >= 1.0 - 1e-9);
  }
  const auto big = local_phase_search(8, 0.025, 100.0, M_PI / 12);
  CHECK_FALSE(big.exhaustive);
  CHECK(big.min_trace >= 7 - 1e-9);
}

TEST_CASE("phase search refuses states double cannot invert") {
  // a common 3π/4 rotation puts the squeezed zero-supermode quadrature into x:
  // at 4ηz = 20 its variance e^-20 is below the rounding of the e^20 entries
  CHECK_THROWS_AS(local_phase_search(3, 0.025, 200.0, M_PI / 8), NumericalError);
  const auto v = rotate_quadratures(large_coupling_covariance<double>(3, 0.025, 200.0),
                                    Eigen::VectorXd(Eigen::VectorXd::Constant(3, 3 * M_PI / 4)));
  CHECK_THROWS_AS(detail::graph_from_covariance(v), NumericalError);
}
