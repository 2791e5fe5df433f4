#pragma once

// Reproducible experiment protocols shared by the CLI and the acceptance suite:
// the planted rigid-transform benchmark, the 2-DoF base-rotation study and the
// 7-DoF teacher/student transfer against the nearest-neighbour baseline.

#include "spdicp/baseline.hpp"
#include "spdicp/kinematics.hpp"
#include "spdicp/registration.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace spdicp {

/// Known transform between clouds: T = P^1/2 R (M^-1/2 S M^-1/2)^exponent R^T P^1/2,
/// with M the source mean and P the translation.
struct PlantedTransform {
  SpdMatrix source_mean;
  Rotation rotation;
  double exponent = 1.0;
  SpdMatrix translation;
};

/// Uniform rotation, exponent in [0.5, 2], translation exp(G) with symmetric Gaussian G (std 0.5).
PlantedTransform random_planted_transform(const SpdMatrix& source_mean, std::mt19937_64& rng);
SpdCloud apply_planted(const PlantedTransform& t, const SpdCloud& sources);

/// Indices of the k points with the largest singularity index, largest first.
std::vector<std::size_t> most_singular(const SpdCloud& cloud, std::size_t k);

struct ToyConfig {
  std::string model = "panda7";
  std::size_t samples = 100;
  std::size_t heldout = 10;
  std::size_t singular_subset = 0;  // 0: fit on all samples
  FitConfig fit;
  std::uint64_t seed = 0;
};

struct ToyOutcome {
  double rmse = 0.0;
  int iterations = 0;
  bool converged = false;
  double scale_exponent = 0.0;
  double true_exponent = 0.0;
};

ToyOutcome run_toy(const ToyConfig& config);

enum class Variant { PtOnly, Icp, PtIcp };

/// Names: "pt-only", "icp", "pt+icp" ("pt" is accepted for pt+icp).
std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

/// M-Eval-1..3 joint trajectories for the planar arms.
std::vector<JointTrajectory> planar_eval_trajectories();

struct TwoDofConfig {
  Variant variant = Variant::PtIcp;
  int weight_exponent = 3;
  std::size_t train_samples = 100;  // subsampled from the sweep dataset
  bool random_training = false;      // independent uniform joint draws per domain instead
  PlanarSweep sweep;
  RotationConfig rotation;
  int icp_max_iter = 100;
  std::uint64_t seed = 0;  // restarts and subsampling offset
};

struct TwoDofOutcome {
  std::array<double, 3> rmse{};
  int iterations = 0;
  std::size_t train_samples = 0;
};

TwoDofOutcome run_two_dof(const TwoDofConfig& config);

/// Scripted arm trajectories (raise forward, raise sideways, bend elbow,
/// rotate shoulder) for the 7-DoF models.
std::vector<JointTrajectory> seven_dof_eval_trajectories(const SerialManipulator& m);

struct SevenDofConfig {
  std::string teacher = "surrogate7_teacher";
  std::string student = "panda7";
  std::size_t train_samples = 100;
  FitConfig fit;
  std::uint64_t seed = 0;
};

struct SevenDofOutcome {
  std::vector<double> rmse_transferred;    // per eval trajectory, against the baseline output
  std::vector<double> rmse_untransferred;  // raw teacher trajectory against the baseline output
  int iterations = 0;
};

SevenDofOutcome run_seven_dof(const SevenDofConfig& config, const BaselineTransfer& baseline);

double median(std::vector<double> values);

}  // namespace spdicp
