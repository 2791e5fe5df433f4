#include "spdicp/kinematics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace spdicp;
using namespace spdicp::testing;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd finite_difference_jacobian(const SerialManipulator& m, const Eigen::VectorXd& q, double h = 1e-6) {
  Eigen::MatrixXd j(3, q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    Eigen::VectorXd a = q, b = q;
    a(i) += h;
    b(i) -= h;
    j.col(i) = (forward_kinematics(m, a).end_effector - forward_kinematics(m, b).end_effector) / (2 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("built-in models") {
  const auto& models = builtin_models();
  CHECK(models.size() == 4);
  CHECK(builtin_model("planar2_horizontal").joints() == 2);
  CHECK(builtin_model("planar2_vertical").joints() == 2);
  CHECK(builtin_model("panda7").joints() == 7);
  CHECK(builtin_model("surrogate7_teacher").joints() == 7);
  CHECK_THROWS_AS(builtin_model("nope"), std::invalid_argument);
}

TEST_CASE("translational Jacobian matches finite differences") {
  std::mt19937_64 rng(40);
  for (const auto& [name, m] : builtin_models()) {
    CAPTURE(name);
    for (int k = 0; k < 25; ++k) {
      const Eigen::VectorXd q = sample_joints(m, rng);
      CHECK(max_abs_diff(translational_jacobian(m, q), finite_difference_jacobian(m, q)) < 1e-6);
    }
  }
}

TEST_CASE("planar forward kinematics by hand") {
  const SerialManipulator& h = builtin_model("planar2_horizontal");
  const Eigen::Vector3d p = forward_kinematics(h, Eigen::Vector2d(kPi / 2, -kPi / 2)).end_effector;
  CHECK(p.isApprox(Eigen::Vector3d(1, 1, 0), 1e-12));
  // The vertical arm moves in the x/z plane.
  const Eigen::Vector3d v = forward_kinematics(builtin_model("planar2_vertical"), Eigen::Vector2d(kPi / 2, 0)).end_effector;
  CHECK(std::abs(v(0)) < 1e-12);
  CHECK(std::abs(v(1)) < 1e-12);
  CHECK(std::abs(v(2)) == doctest::Approx(2.0));
}

TEST_CASE("planar manipulability at (0, pi/2)") {
  const Eigen::Vector2d q(0.0, kPi / 2);
  const SpdMatrix h = manipulability(builtin_model("planar2_horizontal"), q);
  CHECK(h(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(h(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(h(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h(2, 2) == doctest::Approx(1e-4).epsilon(1e-9));

  const SpdMatrix v = manipulability(builtin_model("planar2_vertical"), q);
  CHECK(v(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(v(0, 2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v(2, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v(1, 1) == doctest::Approx(1e-4).epsilon(1e-9));
}

TEST_CASE("surrogate arm reach and shoulder axis") {
  const SerialManipulator& arm = builtin_model("surrogate7_teacher");
  const ForwardKinematics fk = forward_kinematics(arm, Eigen::VectorXd::Zero(7));
  CHECK(fk.end_effector.norm() == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(std::abs(fk.axes[0](1)) == doctest::Approx(1.0));
  std::mt19937_64 rng(41);
  for (int k = 0; k < 50; ++k) CHECK(forward_kinematics(arm, sample_joints(arm, rng)).end_effector.norm() <= 0.8 + 1e-12);
}

TEST_CASE("panda zero pose") {
  const ForwardKinematics fk = forward_kinematics(builtin_model("panda7"), Eigen::VectorXd::Zero(7));
  CHECK_FALSE(fk.within_limits);  // joint 4 limit excludes 0
  CHECK(fk.origins.size() == 8);
  CHECK(fk.axes.size() == 8);
}

TEST_CASE("joint count and limit validation") {
  CHECK_THROWS_AS(forward_kinematics(builtin_model("panda7"), Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(SerialManipulator("x", {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(SerialManipulator("x", {DhRow{}}, {{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SerialManipulator("x", {DhRow{}}, {}), std::invalid_argument);
  Scripted bad{{{"far", {Eigen::Vector2d(10.0, 0.0)}}}};
  CHECK_THROWS_AS(trajectory_dataset(builtin_model("planar2_horizontal"), bad), std::invalid_argument);
  Scripted wrong_dof{{{"short", {Eigen::VectorXd::Zero(3)}}}};
  CHECK_THROWS_AS(trajectory_dataset(builtin_model("planar2_horizontal"), wrong_dof), std::invalid_argument);
  CHECK_THROWS_AS(trajectory_dataset(builtin_model("panda7"), PlanarSweep{}), std::invalid_argument);
}

TEST_CASE("random datasets are deterministic per seed and sample") {
  const SerialManipulator& m = builtin_model("panda7");
  const SpdCloud a = sample_random_dataset(m, 20, 7), b = sample_random_dataset(m, 30, 7);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].matrix() == b[i].matrix());
  CHECK(a.labels()[3] == "random:3");
  CHECK(sample_random_dataset(m, 1, 8)[0].matrix() != a[0].matrix());
  std::mt19937_64 rng(42);
  for (int k = 0; k < 20; ++k) CHECK(m.within_limits(sample_joints(m, rng)));
  CHECK_THROWS_AS(sample_random_dataset(m, 0, 1), std::invalid_argument);
}

TEST_CASE("manipulability floor keeps points positive definite") {
  const SpdMatrix p = manipulability(builtin_model("planar2_horizontal"), Eigen::Vector2d(0.3, 0.0), 1e-3);
  CHECK(sym_eig(p.matrix()).values(0) >= 1e-3 - 1e-15);
}

TEST_CASE("planar sweep dataset layout") {
  const TrajectoryDataset ds = trajectory_dataset(builtin_model("planar2_horizontal"), PlanarSweep{});
  CHECK(ds.cloud.size() == 400);
  CHECK(ds.trajectories.size() == 20);
  CHECK(ds.cloud.labels().front() == "sweep0:0");
  CHECK(ds.cloud.labels().back() == "sweep19:19");
  const auto& first = ds.trajectories.front().samples;
  CHECK(first.front()(0) == first.back()(0));
  CHECK(first.back()(1) - first.front()(1) == doctest::Approx(kPi));
  const auto& last = ds.trajectories.back().samples;
  CHECK(last.front()(1) == last.back()(1));
}

TEST_CASE("subsample picks every stride-th point") {
  const TrajectoryDataset ds = trajectory_dataset(builtin_model("planar2_horizontal"), PlanarSweep{2, 5});
  const SpdCloud s = subsample(ds.cloud, 3, 1);
  REQUIRE(s.size() == 3);
  CHECK(s.labels() == std::vector<std::string>{"sweep0:1", "sweep0:4", "sweep1:2"});
  CHECK_THROWS_AS(subsample(ds.cloud, 0), std::invalid_argument);
}
