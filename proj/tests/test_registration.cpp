#include "spdicp/experiments.hpp"
#include "spdicp/registration.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace spdicp;
using namespace spdicp::testing;

namespace {

SpdCloud shifted_cloud(std::size_t n, std::mt19937_64& rng) {
  const SpdMatrix shift = random_spd(3, rng, 1.0);
  return random_cloud(n, 3, rng).map([&](const SpdMatrix& p) { return congruence(sqrtm(shift).matrix(), p); });
}

FitConfig quick_config() {
  FitConfig c;
  c.rotation.restarts = 2;
  c.icp_max_iter = 10;
  return c;
}

}  // namespace

TEST_CASE("parallel transport matrix maps the teacher mean to the student mean") {
  std::mt19937_64 rng(30);
  for (int k = 0; k < 10; ++k) {
    const SpdMatrix s = random_spd(3, rng, 1.0), t = random_spd(3, rng, 1.0);
    const Eigen::MatrixXd e = pt_matrix(s, t);
    CHECK(relative_error(e * t.matrix() * e.transpose(), s.matrix()) < 1e-10);
    // Principal root: E^2 = S T^-1.
    CHECK(relative_error(e * e, s.matrix() * t.matrix().inverse()) < 1e-9);
  }
  CHECK_THROWS_AS(pt_matrix(SpdMatrix::identity(2), SpdMatrix::identity(3)), std::invalid_argument);
}

TEST_CASE("fit stage post-conditions") {
  std::mt19937_64 rng(31);
  const SpdCloud sources = shifted_cloud(30, rng), targets = shifted_cloud(25, rng);
  for (bool pt : {false, true}) {
    FitConfig cfg = quick_config();
    cfg.use_pt = pt;
    const FitResult r = fit(sources, targets, cfg);
    const FitStages& st = r.report.stages;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    CHECK(max_abs_diff(geometric_mean(st.recentered_sources).matrix(), eye) < 1e-6);
    CHECK(max_abs_diff(geometric_mean(st.recentered_targets).matrix(), eye) < 1e-6);
    CHECK(std::abs(dispersion(st.scaled_targets, SpdMatrix::identity(3)) - r.report.source_dispersion) < 1e-9);
    CHECK(st.transported_targets.has_value() == pt);
    CHECK(r.transform.used_pt() == pt);
    if (pt) {
      CHECK(max_abs_diff(geometric_mean(*st.transported_targets).matrix(), r.transform.student_mean.matrix()) < 1e-8);
    }
    CHECK(r.report.icp_iterations == static_cast<int>(r.report.objective_history.size()));
    CHECK(r.report.correspondences.pairs.size() == targets.size());
  }
}

TEST_CASE("apply reproduces the aligned training targets") {
  std::mt19937_64 rng(32);
  const SpdCloud sources = shifted_cloud(20, rng), targets = shifted_cloud(20, rng);
  const FitResult r = fit(sources, targets, quick_config());
  const SpdCloud again = apply(r.transform, targets);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    CHECK(again[i].matrix() == r.report.stages.aligned_targets[i].matrix());
    CHECK(apply(r.transform, targets[i]).matrix() == again[i].matrix());
  }
  CHECK_THROWS_AS(apply(r.transform, SpdCloud({SpdMatrix::identity(2)})), std::invalid_argument);
}

TEST_CASE("identity transform is the identity map") {
  std::mt19937_64 rng(33);
  const SpdCloud c = random_cloud(5, 3, rng);
  const SpdCloud out = apply(RigidSpdTransform::identity(3), c);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(relative_error(out[i].matrix(), c[i].matrix()) < 1e-12);
}

TEST_CASE("fitting a cloud onto itself recovers the identity") {
  std::mt19937_64 rng(34);
  const SpdCloud c = shifted_cloud(25, rng);
  for (bool pt : {false, true}) {
    FitConfig cfg = quick_config();
    cfg.use_pt = pt;
    const FitResult r = fit(c, c, cfg);
    CHECK(r.transform.scale_exponent == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rotation_angle(r.transform.rotation) < 1e-5);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(dist(r.report.stages.aligned_targets[i], c[i]) < 1e-5);
  }
}

TEST_CASE("transported and plain recentered clouds differ by a fixed rotation") {
  std::mt19937_64 rng(35);
  const SpdCloud sources = shifted_cloud(15, rng), targets = shifted_cloud(15, rng);
  FitConfig cfg = quick_config();
  const FitResult with_pt = fit(sources, targets, cfg);
  cfg.use_pt = false;
  const FitResult without = fit(sources, targets, cfg);
  const RigidSpdTransform& t = with_pt.transform;
  const Eigen::MatrixXd q =
      inv_sqrtm(t.centering_mean).matrix() * *t.pt_matrix * sqrtm(t.teacher_mean).matrix();
  CHECK((q.transpose() * q - Eigen::Matrix3d::Identity()).norm() < 1e-8);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const SpdMatrix rotated = congruence(q, without.report.stages.recentered_targets[i]);
    CHECK(relative_error(rotated.matrix(), with_pt.report.stages.recentered_targets[i].matrix()) < 1e-8);
  }
}

TEST_CASE("planted transform is recovered from known clouds") {
  std::mt19937_64 rng(36);
  const SpdCloud sources = random_cloud(40, 3, rng, 1.0);
  const PlantedTransform planted = random_planted_transform(geometric_mean(sources), rng);
  const SpdCloud targets = apply_planted(planted, sources);
  FitConfig cfg;
  cfg.rotation.restarts = 4;
  const FitResult r = fit(sources, targets, cfg);
  CHECK(r.transform.scale_exponent == doctest::Approx(1.0 / planted.exponent).epsilon(1e-6));
  for (std::size_t i = 0; i < sources.size(); ++i) CHECK(dist(r.report.stages.aligned_targets[i], sources[i]) < 1e-4);
}

TEST_CASE("parallel transport alone only moves the mean") {
  std::mt19937_64 rng(37);
  const SpdCloud sources = shifted_cloud(20, rng), targets = shifted_cloud(20, rng);
  const RigidSpdTransform t = fit_pt_only(sources, targets);
  CHECK(t.used_pt());
  CHECK(t.scale_exponent == 1.0);
  const SpdCloud moved = apply(t, targets);
  CHECK(max_abs_diff(geometric_mean(moved).matrix(), t.student_mean.matrix()) < 1e-8);
  // Congruence preserves pairwise distances.
  CHECK(dist(moved[0], moved[1]) == doctest::Approx(dist(targets[0], targets[1])).epsilon(1e-9));
}

TEST_CASE("fit validates its inputs") {
  const SpdCloud two({SpdMatrix::identity(2)});
  const SpdCloud three({SpdMatrix::identity(3)});
  CHECK_THROWS_AS(fit(two, three), std::invalid_argument);
  FitConfig cfg;
  cfg.icp_max_iter = 0;
  CHECK_THROWS_AS(fit(two, two, cfg), std::invalid_argument);
  CHECK_THROWS_AS(scale_dispersion(two, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_pt_only(two, three), std::invalid_argument);
}
