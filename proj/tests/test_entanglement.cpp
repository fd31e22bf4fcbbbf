#include "anw/entanglement.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace anw;

namespace {

// Independent minimiser: least squares on the Cholesky factor of the rotated
// covariance restricted to the y quadratures, min ‖Lᵀ(w + B g)‖.
double least_squares_vlf(const IndividualCovariance<double>& v, const ModePair& pair, const Eigen::VectorXd& theta) {
  const int l = v.modes();
  const auto r = rotate_quadratures(v, theta).entries();
  const Eigen::MatrixXd vy = r(Eigen::seq(1, 2 * l - 1, 2), Eigen::seq(1, 2 * l - 1, 2));
  const Eigen::MatrixXd lt = vy.llt().matrixU();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(l);
  w(pair.first) = w(pair.second) = 1;
  std::vector<int> aux;
  for (int m = 0; m < l; ++m)
    if (m != pair.first && m != pair.second) aux.push_back(m);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(l, static_cast<Eigen::Index>(aux.size()));
  for (std::size_t a = 0; a < aux.size(); ++a) b(aux[a], static_cast<Eigen::Index>(a)) = 1;
  double y_part = (lt * w).squaredNorm();
  if (!aux.empty()) {
    const Eigen::VectorXd g = (lt * b).colPivHouseholderQr().solve(-(lt * w));
    y_part = (lt * (w + b * g)).squaredNorm();
  }
  const double xi = r(2 * pair.first, 2 * pair.first), xj = r(2 * pair.second, 2 * pair.second);
  return xi + xj - 2 * r(2 * pair.first, 2 * pair.second) + y_part;
}

}  // namespace

TEST_CASE("LO profiles") {
  const auto a = lo_profile<double>(5, Variant::a);
  CHECK(a(0) == 0.0);
  CHECK(a(1) == doctest::Approx(-M_PI / 2));
  CHECK(a(2) == 0.0);
  CHECK(a(3) == doctest::Approx(-M_PI / 2));
  const auto b = lo_profile<double>(6, Variant::b);
  const double expected[] = {0, 0, M_PI / 2, M_PI / 2, 0, 0};
  for (int j = 0; j < 6; ++j) CHECK(b(j) == doctest::Approx(expected[j]));
  CHECK_THROWS_AS(lo_profile<double>(1, Variant::a), ValidationError);
  CHECK(parse_variant("b") == Variant::b);
  CHECK_THROWS_AS(parse_variant("c"), ValidationError);
}

TEST_CASE("VLF pairs") {
  const auto a = vlf_pairs(4, Variant::a);
  REQUIRE(a.size() == 3);
  CHECK(a[2].first == 2);
  CHECK(a[2].second == 3);
  const auto b = vlf_pairs(6, Variant::b);
  REQUIRE(b.size() == 4);
  CHECK(b[0].first == 0);
  CHECK(b[0].second == 2);
  CHECK(b[1].first == 1);
  CHECK(b[1].second == 3);
  CHECK_THROWS_AS(vlf_pairs(3, Variant::b), ValidationError);
}

TEST_CASE("vacuum gives 4 for every inequality") {
  const auto vac = IndividualCovariance<double>::vacuum(5);
  for (const auto& p : vlf_pairs(5, Variant::a)) {
    CHECK(vlf_value(vac, p, MeasurementProfile<double>::unweighted(lo_profile<double>(5, Variant::a))) == 4.0);
    CHECK(optimize_gains(vac, p, lo_profile<double>(5, Variant::a)).value == doctest::Approx(4.0));
  }
}

TEST_CASE("unoptimized large-coupling VLF") {
  test::Gen gen(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int l = gen.integer(2, 30);
    const double eta = gen.uniform(0, 0.1), z = gen.uniform(0, 50);
    const auto v = large_coupling_covariance<double>(l, eta, z);
    const double expected = 4 * ((l - 1) + std::exp(-4 * eta * z)) / l;
    CHECK(asymptotic_vlf<double>(l, eta, z, false) == doctest::Approx(expected).epsilon(1e-14));
    for (const auto& p : vlf_pairs(l, Variant::a)) {
      const double val = vlf_value(v, p, MeasurementProfile<double>::unweighted(lo_profile<double>(l, Variant::a)));
      CHECK(std::abs(val - expected) < 1e-12 * std::cosh(4 * eta * z));
    }
  }
}

TEST_CASE("closed-form limits") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(asymptotic_vlf<double>(4, 0.025, inf, true) == doctest::Approx(17.0 / 6.0).epsilon(1e-15));
  CHECK(asymptotic_vlf<double>(5, 0.025, inf, true) == doctest::Approx(3.2 - 3.2 / 22).epsilon(1e-15));
  CHECK(asymptotic_vlf<double>(2, 0.025, inf, true) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(asymptotic_vlf<double>(3, 0.025, inf, true) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  for (int l = 2; l <= 100; ++l)
    CHECK(asymptotic_vlf<double>(l, 0.025, inf, false) == doctest::Approx(4.0 * (l - 1) / l).epsilon(1e-15));
  double prev = 0;
  for (int l = 2; l <= 100; ++l) {
    const double v = asymptotic_vlf<double>(l, 0.025, inf, true);
    CHECK(v > prev);
    CHECK(v < 4.0);
    prev = v;
  }
  CHECK(asymptotic_vlf<double>(7, 0.025, 0.0, true) == 4.0);
  CHECK_THROWS_AS(asymptotic_vlf<double>(1, 0.025, 1.0, true), ValidationError);
}

TEST_CASE("exact optimizer against an independent least-squares minimiser") {
  test::Gen gen(42);
  for (int trial = 0; trial < 60; ++trial) {
    const auto cfg = [&] {
      auto c = gen.array(11, trial % 2 == 0);
      if (c.n % 2 == 0) {
        c.n += 1;
        c.profile = Eigen::VectorXd::Ones(c.n - 1);
      }
      return c;
    }();
    if (cfg.n < 3) continue;
    // 4ηz <= 10 keeps the state resolvable in double; beyond that see the mpfr suite
    const double z = gen.uniform(0, std::min(30.0, 2.5 / std::max(cfg.eta, 1e-3)));
    const auto full = covariance_individual(cfg, supermode_decomposition(cfg), z);
    std::vector<int> odd;
    for (int j = 0; j < cfg.n; j += 2) odd.push_back(j);
    const auto v = restrict_modes(full, odd);
    const int l = v.modes();
    const auto theta = lo_profile<double>(l, Variant::a);
    CAPTURE(cfg.eta);
    CAPTURE(z);
    for (const auto& p : vlf_pairs(l, Variant::a)) {
      const auto sol = optimize_gains(v, p, theta);
      CHECK(sol.value == doctest::Approx(least_squares_vlf(v, p, theta)).epsilon(1e-9));
      CHECK(sol.gains(p.first) == 0.0);
      CHECK(sol.gains(p.second) == 0.0);
      // never worse than G = 0, and no random perturbation improves it
      CHECK(sol.value <= vlf_value(v, p, MeasurementProfile<double>::unweighted(theta)) + 1e-12);
      for (int k = 0; k < 5; ++k) {
        Eigen::VectorXd g = sol.gains;
        for (int m = 0; m < l; ++m)
          if (m != p.first && m != p.second) g(m) += gen.uniform(-1e-3, 1e-3);
        CHECK(vlf_value(v, p, MeasurementProfile<double>{theta, g}) >= sol.value - 1e-12);
      }
    }
  }
}

TEST_CASE("exact optimizer on the large-coupling state: even l equals the closed form") {
  for (int l = 2; l <= 20; l += 2)
    for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
      const double eta = 0.025, z = t / (4 * eta);
      const auto v = large_coupling_covariance<double>(l, eta, z);
      const double closed = asymptotic_vlf<double>(l, eta, z, true);
      for (const auto& p : vlf_pairs(l, Variant::a)) {
        CAPTURE(l);
        CAPTURE(t);
        CHECK(std::abs(optimize_gains(v, p, lo_profile<double>(l, Variant::a)).value - closed) < 1e-9);
      }
    }
}

TEST_CASE("exact optimizer on the large-coupling state: odd l never above the symmetric ansatz") {
  for (int l = 3; l <= 21; l += 2)
    for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
      const double eta = 0.025, z = t / (4 * eta);
      const auto v = large_coupling_covariance<double>(l, eta, z);
      const double closed = asymptotic_vlf<double>(l, eta, z, true);
      for (const auto& p : vlf_pairs(l, Variant::a))
        CHECK(optimize_gains(v, p, lo_profile<double>(l, Variant::a)).value <= closed + 1e-10);
    }
}

TEST_CASE("singular normal equations fall back to minimum-norm gains") {
  // Zero y-fluctuations on two auxiliary modes make Bᵀ V B rank deficient.
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(8, 8);
  m(5, 5) = m(7, 7) = 1e-30;
  m(5, 7) = m(7, 5) = 1e-30;
  const IndividualCovariance<double> v(m);
  const auto sol = optimize_gains(v, ModePair{0, 1}, Eigen::VectorXd(Eigen::VectorXd::Zero(4)));
  CHECK(sol.singular);
  CHECK(std::isfinite(sol.value));
}

TEST_CASE("large-coupling covariance is a pure physical state") {
  for (int l : {1, 2, 5, 8})
    for (double z : {0.0, 5.0, 40.0}) {
      const auto v = large_coupling_covariance<double>(l, 0.025, z);
      const auto rep = check_physicality(v);
      CHECK(rep.physical());
      CHECK(rep.purity == doctest::Approx(1.0).epsilon(1e-9));
    }
  CHECK_THROWS_AS(large_coupling_covariance<double>(0, 0.025, 1.0), ValidationError);
  CHECK_THROWS_AS(large_coupling_covariance<double>(3, 0.025, -1.0), ValidationError);
}

TEST_CASE("MQC graph for variant a on six labels") {
  const double eta = 0.025, z = 20;
  const auto g = duan_nullifiers(large_coupling_covariance<double>(6, eta, z), Variant::a);
  REQUIRE(g.edges.size() == 9);
  const double half_vlf = asymptotic_vlf<double>(6, eta, z, false) / 2;
  for (const auto& e : g.edges) {
    CHECK((e.i + e.j) % 2 == 1);  // odd label to even label
    CHECK(e.weight == doctest::Approx(half_vlf).epsilon(1e-12));
  }
  for (const auto& n : nullifier_table(large_coupling_covariance<double>(6, eta, z), Variant::a))
    if ((n.i + n.j) % 2 == 1) {
      CHECK(n.x_variance == doctest::Approx(half_vlf).epsilon(1e-12));
      CHECK(n.y_variance == doctest::Approx(half_vlf).epsilon(1e-12));
    }
  CHECK(connected_components(g).size() == 1);
}

TEST_CASE("variant b splits the labels into two disjoint graphs") {
  const auto g = duan_nullifiers(large_coupling_covariance<double>(6, 0.025, 20.0), Variant::b);
  const auto comps = connected_components(g);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0] == std::vector<int>{0, 2, 4});  // waveguides 1, 5, 9
  CHECK(comps[1] == std::vector<int>{1, 3, 5});  // waveguides 3, 7, 11
  for (const auto& e : g.edges) CHECK((e.i - e.j) % 2 == 0);
  CHECK(EntanglementGraph::waveguide(4) == 9);
}

TEST_CASE("no entanglement without propagation") {
  const auto g = duan_nullifiers(large_coupling_covariance<double>(6, 0.025, 0.0), Variant::a);
  CHECK(g.edges.empty());
  CHECK(connected_components(g).size() == 6);
}

TEST_CASE("VLF suite on a finite array") {
  const auto cfg = ArrayConfig<double>::homogeneous(5, 0.7, 0.025);
  const auto at0 = vlf_suite(cfg, 0.0, Variant::a);
  REQUIRE(at0.values.size() == 2);
  for (double v : at0.values) CHECK(v == 4.0);
  CHECK_FALSE(at0.fully_inseparable);

  const auto rep = vlf_suite(cfg, 30.0, Variant::a);
  CHECK(rep.fully_inseparable);
  CHECK_FALSE(rep.outside_model_scope);
  CHECK(rep.asymptote == doctest::Approx(asymptotic_vlf<double>(3, 0.025, 30.0, true)));
  for (double v : rep.values) CHECK(v < 4.0);

  const auto unopt = vlf_suite(cfg, 30.0, Variant::a, false);
  for (std::size_t k = 0; k < rep.values.size(); ++k) CHECK(rep.values[k] <= unopt.values[k] + 1e-12);

  CHECK_THROWS_AS(vlf_suite(ArrayConfig<double>::homogeneous(4, 0.7, 0.025), 1.0, Variant::a), ValidationError);
  const auto weak = vlf_suite(ArrayConfig<double>::homogeneous(3, 0.01, 0.02), 1.0, Variant::a);
  CHECK(weak.outside_model_scope);
}

TEST_CASE("LO phase search never makes things worse") {
  const auto cfg = ArrayConfig<double>::homogeneous(5, 0.7, 0.025);
  const auto full = covariance_individual(cfg, supermode_decomposition(cfg), 5.0);
  const auto v = restrict_modes(full, {0, 2, 4});
  const auto start = vlf_suite(cfg, 5.0, Variant::a);
  const auto found = search_lo_profile(v, Variant::a, M_PI / 36, 5);
  CHECK(found.worst <= *std::max_element(start.values.begin(), start.values.end()) + 1e-12);
}
