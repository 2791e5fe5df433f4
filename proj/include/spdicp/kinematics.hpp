#pragma once

// Serial manipulators in standard (distal) Denavit-Hartenberg form, their
// translational Jacobians, and manipulability datasets built from them.

#include "spdicp/spd.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace spdicp {

/// One standard DH row: Rz(theta + theta_offset) Tz(d) Tx(a) Rx(alpha).
struct DhRow {
  double a = 0.0;      // m
  double d = 0.0;      // m
  double alpha = 0.0;  // rad
  double theta_offset = 0.0;  // rad
};

struct JointLimits {
  double lo = 0.0;
  double hi = 0.0;
};

struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// Revolute DH chain. Throws std::invalid_argument on inconsistent limits.
class SerialManipulator {
 public:
  SerialManipulator(std::string name, std::vector<DhRow> dh, std::vector<JointLimits> limits, Pose base = {});

  const std::string& name() const { return name_; }
  const std::vector<DhRow>& dh() const { return dh_; }
  const std::vector<JointLimits>& limits() const { return limits_; }
  const Pose& base() const { return base_; }
  std::size_t joints() const { return dh_.size(); }

  bool within_limits(const Eigen::VectorXd& q) const;

 private:
  std::string name_;
  std::vector<DhRow> dh_;
  std::vector<JointLimits> limits_;
  Pose base_;
};

struct ForwardKinematics {
  Eigen::Vector3d end_effector;
  std::vector<Eigen::Vector3d> origins;  // frames 0..N, world frame
  std::vector<Eigen::Vector3d> axes;     // z axes of frames 0..N
  bool within_limits = true;             // soft check
};

ForwardKinematics forward_kinematics(const SerialManipulator& m, const Eigen::VectorXd& q);

/// 3 x N; column i = z_{i-1} x (p_e - p_{i-1}).
Eigen::MatrixXd translational_jacobian(const SerialManipulator& m, const Eigen::VectorXd& q);

/// J J^T with eigenvalues floored at `floor`.
SpdMatrix manipulability(const SerialManipulator& m, const Eigen::VectorXd& q, double floor = 1e-4);

/// Joint vector drawn uniformly inside the limits of m.
Eigen::VectorXd sample_joints(const SerialManipulator& m, std::mt19937_64& rng);

/// count manipulabilities from uniform joint samples. Sample i uses its own
/// RNG stream derived from (seed, i).
SpdCloud sample_random_dataset(const SerialManipulator& m, std::size_t count, std::uint64_t seed,
                               double floor = 1e-4);

struct JointTrajectory {
  std::string id;
  std::vector<Eigen::VectorXd> samples;
};

/// 2-DoF protocol: half of the trajectories hold the shoulder at evenly spaced
/// angles while the elbow sweeps 180 degrees, the other half hold the elbow.
struct PlanarSweep {
  int n_fixed = 20;
  int n_steps = 20;
};

struct Scripted {
  std::vector<JointTrajectory> trajectories;
};

using TrajectoryProtocol = std::variant<PlanarSweep, Scripted>;

struct TrajectoryDataset {
  SpdCloud cloud;  // labels are "<trajectory id>:<step>"
  std::vector<JointTrajectory> trajectories;
};

std::vector<JointTrajectory> planar_sweep_trajectories(const SerialManipulator& m, const PlanarSweep& sweep);

TrajectoryDataset trajectory_dataset(const SerialManipulator& m, const TrajectoryProtocol& protocol,
                                     double floor = 1e-4);

/// Every stride-th point starting at offset.
SpdCloud subsample(const SpdCloud& cloud, std::size_t stride, std::size_t offset = 0);

/// planar2_horizontal, planar2_vertical, panda7, surrogate7_teacher.
const std::map<std::string, SerialManipulator>& builtin_models();
const SerialManipulator& builtin_model(const std::string& name);

}  // namespace spdicp
