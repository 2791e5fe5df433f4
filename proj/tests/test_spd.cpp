#include "spdicp/spd.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace spdicp;
using namespace spdicp::testing;

TEST_CASE("SpdMatrix rejects asymmetric, indefinite and non-square input") {
  Eigen::MatrixXd asym(2, 2);
  asym << 2, 1, 0, 2;
  CHECK_THROWS_AS(SpdMatrix{asym}, std::invalid_argument);

  Eigen::MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  CHECK_THROWS_AS(SpdMatrix{indef}, std::domain_error);

  CHECK_THROWS_AS(SpdMatrix{Eigen::MatrixXd::Identity(2, 3)}, std::invalid_argument);
  CHECK_THROWS_AS(SpdMatrix{Eigen::MatrixXd::Zero(2, 2)}, std::domain_error);

  Eigen::MatrixXd nan = Eigen::MatrixXd::Identity(2, 2);
  nan(0, 1) = nan(1, 0) = std::nan("");
  CHECK_THROWS(SpdMatrix{nan});
}

TEST_CASE("SpdCloud must be non-empty and homogeneous") {
  CHECK_THROWS_AS(SpdCloud(std::vector<SpdMatrix>{}), std::invalid_argument);
  CHECK_THROWS_AS(SpdCloud({SpdMatrix::identity(2), SpdMatrix::identity(3)}), std::invalid_argument);
  CHECK_THROWS_AS(SpdCloud({SpdMatrix::identity(2)}, {"a", "b"}), std::invalid_argument);
  SpdCloud c({SpdMatrix::identity(2), SpdMatrix::diagonal(Eigen::Vector2d(2, 3))}, {"a", "b"});
  CHECK(c.subset({1}).labels() == std::vector<std::string>{"b"});
}

TEST_CASE("distance matches the generalized eigenvalue oracle") {
  std::mt19937_64 rng(1);
  for (int d = 1; d <= 5; ++d) {
    for (int k = 0; k < 10; ++k) {
      const SpdMatrix a = random_spd(d, rng), b = random_spd(d, rng);
      CHECK(dist(a, b) == doctest::Approx(oracle_dist(a, b)).epsilon(1e-10));
      CHECK(dist(a, b) == doctest::Approx(dist(b, a)).epsilon(1e-10));
      CHECK(dist_squared(a, b) == doctest::Approx(dist(a, b) * dist(a, b)).epsilon(1e-10));
    }
  }
  CHECK(dist(SpdMatrix::identity(3), SpdMatrix::identity(3)) == 0.0);
}

TEST_CASE("distance between diagonal matrices is the log-ratio norm") {
  const SpdMatrix a = SpdMatrix::diagonal(Eigen::Vector3d(1, 2, 4));
  const SpdMatrix b = SpdMatrix::diagonal(Eigen::Vector3d(2, 2, 1));
  const double expected = std::sqrt(std::pow(std::log(2.0), 2) + std::pow(std::log(0.25), 2));
  CHECK(dist(a, b) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("distance is invariant under congruence") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const SpdMatrix a = random_spd(3, rng), b = random_spd(3, rng);
    const Eigen::MatrixXd g = random_matrix(3, rng);
    CHECK(std::abs(dist(congruence(g, a), congruence(g, b)) - dist(a, b)) < 1e-9);
  }
}

TEST_CASE("triangle inequality") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const SpdMatrix a = random_spd(3, rng), b = random_spd(3, rng), c = random_spd(3, rng);
    CHECK(dist(a, c) <= dist(a, b) + dist(b, c) + 1e-12);
  }
}

TEST_CASE("log and exp maps are mutually inverse") {
  std::mt19937_64 rng(4);
  for (int d = 2; d <= 4; ++d) {
    for (int k = 0; k < 10; ++k) {
      const SpdMatrix base = random_spd(d, rng), m = random_spd(d, rng);
      const SymmetricTangent l = log_map(m, base);
      CHECK(relative_error(exp_map(l).matrix(), m.matrix()) < 1e-9);
      // Tangent norm at the base equals the distance.
      CHECK(std::sqrt(inner(l, l, base)) == doctest::Approx(dist(base, m)).epsilon(1e-9));

      const Eigen::MatrixXd v = random_symmetric(d, rng, 0.5);
      CHECK(relative_error(log_map(exp_map(v, base), base).entries(), v) < 1e-9);
    }
  }
}

TEST_CASE("log map at the identity is the matrix logarithm") {
  const SpdMatrix m = SpdMatrix::diagonal(Eigen::Vector2d(std::exp(1.0), std::exp(-2.0)));
  const Eigen::MatrixXd l = log_map(m, SpdMatrix::identity(2)).entries();
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(l(1, 1) == doctest::Approx(-2.0));
  CHECK(l(0, 1) == 0.0);
}

TEST_CASE("tangent vectors must match the base dimension and be symmetric") {
  CHECK_THROWS_AS(SymmetricTangent(Eigen::MatrixXd::Zero(3, 3), SpdMatrix::identity(2)), std::invalid_argument);
  Eigen::MatrixXd skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_THROWS_AS(SymmetricTangent(skew, SpdMatrix::identity(2)), std::invalid_argument);
  CHECK_THROWS_AS(log_map(SpdMatrix::identity(2), SpdMatrix::identity(3)), std::invalid_argument);
}

TEST_CASE("geodesic endpoints, constant speed and extrapolation flag") {
  std::mt19937_64 rng(5);
  const SpdMatrix a = random_spd(3, rng), b = random_spd(3, rng);
  CHECK(relative_error(geodesic(a, b, 0.0).point.matrix(), a.matrix()) < 1e-12);
  CHECK(relative_error(geodesic(a, b, 1.0).point.matrix(), b.matrix()) < 1e-10);
  const double total = dist(a, b);
  for (double t : {0.1, 0.3, 0.75}) {
    const GeodesicPoint g = geodesic(a, b, t);
    CHECK_FALSE(g.extrapolated);
    CHECK(dist(a, g.point) == doctest::Approx(t * total).epsilon(1e-9));
    CHECK(dist(g.point, b) == doctest::Approx((1 - t) * total).epsilon(1e-9));
  }
  CHECK(geodesic(a, b, 1.5).extrapolated);
  CHECK(geodesic(a, b, -0.5).extrapolated);
  CHECK(dist(a, geodesic(a, b, 1.5).point) == doctest::Approx(1.5 * total).epsilon(1e-9));
}

TEST_CASE("two-point mean is the geodesic midpoint") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const SpdMatrix a = random_spd(3, rng), b = random_spd(3, rng);
    const SpdMatrix mid = geometric_mean(SpdCloud({a, b}));
    CHECK(dist(mid, a) == doctest::Approx(dist(mid, b)).epsilon(1e-9));
    CHECK(dist(mid, a) == doctest::Approx(0.5 * dist(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("Karcher mean satisfies the first-order condition") {
  std::mt19937_64 rng(7);
  for (int n : {3, 10, 40}) {
    const SpdCloud c = random_cloud(static_cast<std::size_t>(n), 3, rng);
    const SpdMatrix mean = geometric_mean(c);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(3, 3);
    for (const auto& p : c) sum += log_map(p, mean).entries();
    CHECK(sum.norm() < 1e-8 * n);
  }
}

TEST_CASE("Karcher mean is congruence equivariant and fixes a single point") {
  std::mt19937_64 rng(8);
  const SpdCloud c = random_cloud(12, 3, rng);
  const Eigen::MatrixXd g = random_matrix(3, rng);
  const SpdMatrix m = geometric_mean(c);
  const SpdMatrix mg = geometric_mean(c.map([&](const SpdMatrix& p) { return congruence(g, p); }));
  CHECK(relative_error(mg.matrix(), congruence(g, m).matrix()) < 1e-8);

  const SpdMatrix one = random_spd(3, rng);
  CHECK(geometric_mean(SpdCloud({one})).matrix() == one.matrix());
}

TEST_CASE("Karcher mean of commuting matrices is the log-Euclidean mean") {
  const SpdCloud c({SpdMatrix::diagonal(Eigen::Vector2d(1, 8)), SpdMatrix::diagonal(Eigen::Vector2d(4, 1)),
                    SpdMatrix::diagonal(Eigen::Vector2d(16, 1))});
  const SpdMatrix m = geometric_mean(c);
  CHECK(m(0, 0) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(m(1, 1) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("Karcher iteration reports non-convergence with the last iterate") {
  std::mt19937_64 rng(9);
  const SpdCloud c = random_cloud(6, 3, rng, 1.5);
  try {
    geometric_mean(c, {1e-14, 1});
    FAIL("expected KarcherNonConvergence");
  } catch (const KarcherNonConvergence& e) {
    CHECK(e.iterations() == 1);
    CHECK(e.residual() > 0.0);
    CHECK(e.last_iterate().rows() == 3);
  }
}

TEST_CASE("Karcher mean converges on widely spread near-singular clouds") {
  std::mt19937_64 rng(10);
  std::vector<SpdMatrix> pts;
  for (int k = 0; k < 12; ++k) {
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(3, rng)).householderQ();
    const Eigen::Vector3d ev(1e-4 * (1 + k), 0.3 + 0.05 * k, 5.0);
    pts.push_back(SpdMatrix(Eigen::MatrixXd(q * ev.asDiagonal() * q.transpose())));
  }
  const SpdCloud c(pts);
  const SpdMatrix m = geometric_mean(c);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(3, 3);
  for (const auto& p : c) sum += log_map(p, m).entries();
  CHECK(sum.norm() / m.matrix().norm() < 1e-6);
}

TEST_CASE("dispersion scales exactly under matrix powers about the identity") {
  std::mt19937_64 rng(11);
  const SpdCloud c = random_cloud(15, 3, rng);
  const SpdMatrix eye = SpdMatrix::identity(3);
  for (double s : {0.5, 1.3, 2.0}) {
    const SpdCloud cs = c.map([s](const SpdMatrix& p) { return powm(p, s); });
    CHECK(std::abs(dispersion(cs, eye) - s * dispersion(c, eye)) < 1e-10);
  }
}

TEST_CASE("project_to_spd floors small eigenvalues and leaves others alone") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 1;  // eigenvalues 0 and 2
  const SpdMatrix p = project_to_spd(m, 1e-4);
  const SymEig e = sym_eig(p.matrix());
  CHECK(e.values(0) == doctest::Approx(1e-4).epsilon(1e-9));
  CHECK(e.values(1) == doctest::Approx(2.0).epsilon(1e-12));

  Eigen::MatrixXd ok(2, 2);
  ok << 2, 0.5, 0.5, 1;
  CHECK(project_to_spd(ok).matrix() == ok);
  CHECK_THROWS_AS(project_to_spd(ok, 0.0), std::invalid_argument);
}

TEST_CASE("matrix functions agree with their definitions") {
  std::mt19937_64 rng(12);
  const SpdMatrix m = random_spd(4, rng);
  const Eigen::MatrixXd s = sqrtm(m).matrix();
  CHECK(relative_error(s * s, m.matrix()) < 1e-12);
  CHECK(relative_error(inv_sqrtm(m).matrix() * s, Eigen::MatrixXd::Identity(4, 4)) < 1e-12);
  CHECK(relative_error(powm(m, 2.0).matrix(), m.matrix() * m.matrix()) < 1e-12);
  CHECK(relative_error(inverse(m).matrix() * m.matrix(), Eigen::MatrixXd::Identity(4, 4)) < 1e-12);
  CHECK(relative_error(expm(logm(m)).matrix(), m.matrix()) < 1e-12);
  CHECK_THROWS_AS(mat_fn(-Eigen::MatrixXd::Identity(2, 2), MatFn::log()), std::domain_error);
}
