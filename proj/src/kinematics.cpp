#include "spdicp/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spdicp {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix4d dh_transform(const DhRow& row, double q) {
  const double theta = q + row.theta_offset;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Eigen::Matrix4d t;
  // clang-format off
  t << ct, -st * ca,  st * sa, row.a * ct,
       st,  ct * ca, -ct * sa, row.a * st,
       0.0,      sa,       ca, row.d,
       0.0,     0.0,      0.0, 1.0;
  // clang-format on
  return t;
}

void require_joint_count(const SerialManipulator& m, const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != m.joints()) {
    std::ostringstream os;
    os << m.name() << ": expected " << m.joints() << " joint values, got " << q.size();
    throw std::invalid_argument(os.str());
  }
}

std::mt19937_64 sample_stream(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index & 0xffffffffu), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::map<std::string, SerialManipulator> make_builtin_models() {
  std::map<std::string, SerialManipulator> models;

  const std::vector<DhRow> planar{{1.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}};
  const std::vector<JointLimits> planar_limits{{-kPi, kPi}, {-kPi, kPi}};
  models.emplace("planar2_horizontal", SerialManipulator("planar2_horizontal", planar, planar_limits));
  Pose vertical;
  vertical.rotation = Eigen::AngleAxisd(kPi / 2.0, Eigen::Vector3d::UnitX()).toRotationMatrix();
  models.emplace("planar2_vertical", SerialManipulator("planar2_vertical", planar, planar_limits, vertical));

  // Franka Panda, modified DH rewritten in standard form; d7 includes the flange.
  const std::vector<DhRow> panda{
      {0.0, 0.333, -kPi / 2.0, 0.0},   {0.0, 0.0, kPi / 2.0, 0.0},     {0.0825, 0.316, kPi / 2.0, 0.0},
      {-0.0825, 0.0, -kPi / 2.0, 0.0}, {0.0, 0.384, kPi / 2.0, 0.0},   {0.088, 0.0, kPi / 2.0, 0.0},
      {0.0, 0.107, 0.0, 0.0},
  };
  const std::vector<JointLimits> panda_limits{
      {-2.8973, 2.8973}, {-1.7628, 1.7628}, {-2.8973, 2.8973}, {-3.0718, -0.0698},
      {-2.8973, 2.8973}, {-0.0175, 3.7525}, {-2.8973, 2.8973},
  };
  models.emplace("panda7", SerialManipulator("panda7", panda, panda_limits));

  // Synthetic human-arm stand-in: spherical shoulder, elbow, spherical wrist.
  // Upper arm 0.33 m, forearm 0.27 m, hand 0.20 m (0.8 m stretched reach).
  const std::vector<DhRow> arm{
      {0.0, 0.0, -kPi / 2.0, 0.0}, {0.0, 0.0, kPi / 2.0, 0.0},  {0.0, 0.33, -kPi / 2.0, 0.0},
      {0.0, 0.0, kPi / 2.0, 0.0},  {0.0, 0.27, -kPi / 2.0, 0.0}, {0.0, 0.0, kPi / 2.0, 0.0},
      {0.0, 0.20, 0.0, 0.0},
  };
  const std::vector<JointLimits> arm_limits{
      {-1.0, 3.0},   // shoulder flexion
      {-0.5, 2.8},   // shoulder abduction
      {-1.5, 1.5},   // humeral rotation
      {0.0, 2.5},    // elbow flexion
      {-1.5, 1.5},   // forearm pronation
      {-1.2, 1.2},   // wrist flexion
      {-0.4, 0.6},   // wrist deviation
  };
  // The shoulder flexion axis is horizontal (world y), as in a standing person.
  Pose shoulder;
  shoulder.rotation = Eigen::AngleAxisd(-kPi / 2.0, Eigen::Vector3d::UnitX()).toRotationMatrix();
  models.emplace("surrogate7_teacher", SerialManipulator("surrogate7_teacher", arm, arm_limits, shoulder));
  return models;
}

}  // namespace

SerialManipulator::SerialManipulator(std::string name, std::vector<DhRow> dh, std::vector<JointLimits> limits,
                                     Pose base)
    : name_(std::move(name)), dh_(std::move(dh)), limits_(std::move(limits)), base_(std::move(base)) {
  if (dh_.empty()) throw std::invalid_argument(name_ + ": manipulator needs at least one joint");
  if (dh_.size() != limits_.size()) throw std::invalid_argument(name_ + ": DH row count differs from limit count");
  for (const auto& l : limits_)
    if (!(l.lo < l.hi)) throw std::invalid_argument(name_ + ": joint limit min must be below max");
}

bool SerialManipulator::within_limits(const Eigen::VectorXd& q) const {
  if (static_cast<std::size_t>(q.size()) != joints()) return false;
  for (std::size_t i = 0; i < joints(); ++i)
    if (q(i) < limits_[i].lo || q(i) > limits_[i].hi) return false;
  return true;
}

ForwardKinematics forward_kinematics(const SerialManipulator& m, const Eigen::VectorXd& q) {
  require_joint_count(m, q);
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.topLeftCorner<3, 3>() = m.base().rotation;
  t.topRightCorner<3, 1>() = m.base().translation;

  ForwardKinematics fk;
  fk.within_limits = m.within_limits(q);
  fk.origins.reserve(m.joints() + 1);
  fk.axes.reserve(m.joints() + 1);
  fk.origins.push_back(t.topRightCorner<3, 1>());
  fk.axes.push_back(t.block<3, 1>(0, 2));
  for (std::size_t i = 0; i < m.joints(); ++i) {
    t = t * dh_transform(m.dh()[i], q(i));
    fk.origins.push_back(t.topRightCorner<3, 1>());
    fk.axes.push_back(t.block<3, 1>(0, 2));
  }
  fk.end_effector = fk.origins.back();
  return fk;
}

Eigen::MatrixXd translational_jacobian(const SerialManipulator& m, const Eigen::VectorXd& q) {
  const ForwardKinematics fk = forward_kinematics(m, q);
  Eigen::MatrixXd j(3, m.joints());
  for (std::size_t i = 0; i < m.joints(); ++i) j.col(i) = fk.axes[i].cross(fk.end_effector - fk.origins[i]);
  return j;
}

SpdMatrix manipulability(const SerialManipulator& m, const Eigen::VectorXd& q, double floor) {
  const Eigen::MatrixXd j = translational_jacobian(m, q);
  return project_to_spd(j * j.transpose(), floor);
}

Eigen::VectorXd sample_joints(const SerialManipulator& m, std::mt19937_64& rng) {
  Eigen::VectorXd q(m.joints());
  for (std::size_t i = 0; i < m.joints(); ++i) {
    std::uniform_real_distribution<double> u(m.limits()[i].lo, m.limits()[i].hi);
    q(i) = u(rng);
  }
  return q;
}

SpdCloud sample_random_dataset(const SerialManipulator& m, std::size_t count, std::uint64_t seed, double floor) {
  if (count == 0) throw std::invalid_argument("sample_random_dataset: count must be >= 1");
  std::vector<SpdMatrix> points;
  std::vector<std::string> labels;
  points.reserve(count);
  labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng = sample_stream(seed, i);
    points.push_back(manipulability(m, sample_joints(m, rng), floor));
    labels.push_back("random:" + std::to_string(i));
  }
  return SpdCloud(std::move(points), std::move(labels));
}

std::vector<JointTrajectory> planar_sweep_trajectories(const SerialManipulator& m, const PlanarSweep& sweep) {
  if (m.joints() != 2) throw std::invalid_argument("planar_sweep: protocol needs a 2-DoF manipulator");
  if (sweep.n_fixed < 1 || sweep.n_steps < 2) throw std::invalid_argument("planar_sweep: need n_fixed >= 1, n_steps >= 2");

  std::vector<JointTrajectory> out;
  const int shoulder_fixed = (sweep.n_fixed + 1) / 2;
  for (int k = 0; k < sweep.n_fixed; ++k) {
    const std::size_t fixed = k < shoulder_fixed ? 0 : 1;
    const std::size_t moving = 1 - fixed;
    const int group = fixed == 0 ? shoulder_fixed : sweep.n_fixed - shoulder_fixed;
    const int slot = fixed == 0 ? k : k - shoulder_fixed;
    const JointLimits& fl = m.limits()[fixed];
    const JointLimits& ml = m.limits()[moving];
    const double fixed_angle = fl.lo + (slot + 0.5) * (fl.hi - fl.lo) / group;
    const double center = 0.5 * (ml.lo + ml.hi);
    const double from = std::max(ml.lo, center - kPi / 2.0);
    const double to = std::min(ml.hi, center + kPi / 2.0);

    JointTrajectory traj;
    traj.id = "sweep" + std::to_string(k);
    for (int step = 0; step < sweep.n_steps; ++step) {
      Eigen::VectorXd q(2);
      q(fixed) = fixed_angle;
      q(moving) = from + (to - from) * step / (sweep.n_steps - 1);
      traj.samples.push_back(q);
    }
    out.push_back(std::move(traj));
  }
  return out;
}

TrajectoryDataset trajectory_dataset(const SerialManipulator& m, const TrajectoryProtocol& protocol, double floor) {
  std::vector<JointTrajectory> trajectories;
  if (const auto* sweep = std::get_if<PlanarSweep>(&protocol)) {
    trajectories = planar_sweep_trajectories(m, *sweep);
  } else {
    trajectories = std::get<Scripted>(protocol).trajectories;
  }

  std::vector<SpdMatrix> points;
  std::vector<std::string> labels;
  for (const auto& traj : trajectories) {
    for (std::size_t step = 0; step < traj.samples.size(); ++step) {
      const Eigen::VectorXd& q = traj.samples[step];
      if (static_cast<std::size_t>(q.size()) != m.joints())
        throw std::invalid_argument("trajectory_dataset: trajectory '" + traj.id + "' does not match the DoF of " + m.name());
      if (!m.within_limits(q))
        throw std::invalid_argument("trajectory_dataset: trajectory '" + traj.id + "' leaves the joint limits");
      points.push_back(manipulability(m, q, floor));
      labels.push_back(traj.id + ":" + std::to_string(step));
    }
  }
  if (points.empty()) throw std::invalid_argument("trajectory_dataset: protocol produced no samples");
  return {SpdCloud(std::move(points), std::move(labels)), std::move(trajectories)};
}

SpdCloud subsample(const SpdCloud& cloud, std::size_t stride, std::size_t offset) {
  if (stride == 0) throw std::invalid_argument("subsample: stride must be >= 1");
  std::vector<std::size_t> idx;
  for (std::size_t i = offset; i < cloud.size(); i += stride) idx.push_back(i);
  return cloud.subset(idx);
}

const std::map<std::string, SerialManipulator>& builtin_models() {
  static const std::map<std::string, SerialManipulator> models = make_builtin_models();
  return models;
}

const SerialManipulator& builtin_model(const std::string& name) {
  const auto& models = builtin_models();
  const auto it = models.find(name);
  if (it == models.end()) throw std::invalid_argument("unknown model '" + name + "'");
  return it->second;
}

}  // namespace spdicp
