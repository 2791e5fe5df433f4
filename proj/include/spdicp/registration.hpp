#pragma once

// Manifold-aware ICP between a teacher (target) cloud and a student (source)
// cloud on the SPD manifold, with optional parallel-transport initialization.
//
// Fitting runs, in order: parallel transport of the targets onto the source
// mean, recentering of both clouds at the identity, dispersion matching by a
// matrix power, then alternating correspondence matching and rotation
// alignment. The student mean is re-applied when the transform is used.

#include "spdicp/matching.hpp"
#include "spdicp/rotation.hpp"
#include "spdicp/spd.hpp"

#include <optional>
#include <vector>

namespace spdicp {

struct RigidSpdTransform {
  SpdMatrix teacher_mean;    // mean of the raw teacher cloud
  SpdMatrix centering_mean;  // mean used for recentering (post-transport when used_pt)
  SpdMatrix student_mean;
  double scale_exponent = 1.0;
  Rotation rotation;
  std::optional<Eigen::MatrixXd> pt_matrix;

  bool used_pt() const { return pt_matrix.has_value(); }
  Eigen::Index dim() const { return teacher_mean.dim(); }

  static RigidSpdTransform identity(Eigen::Index dim);
};

struct FitConfig {
  bool use_pt = true;
  int weight_exponent = 3;
  int icp_max_iter = 100;
  MatchMode match_mode = MatchMode::ManyToOne;
  RotationConfig rotation;
  std::uint64_t seed = 0;  // drives the rotation restarts
  KarcherOptions karcher;
  double angle_tol = 1e-6;
  double relative_objective_tol = 1e-10;
};

/// Intermediate clouds, in algorithm order.
struct FitStages {
  std::optional<SpdCloud> transported_targets;
  SpdCloud recentered_sources;
  SpdCloud recentered_targets;
  SpdCloud scaled_targets;
  SpdCloud rotated_targets;
  SpdCloud aligned_targets;
};

struct FitReport {
  int icp_iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // best rotation objective per ICP iteration
  std::vector<double> rotation_updates;   // update angle per ICP iteration (radians)
  double source_dispersion = 0.0;
  double target_dispersion = 0.0;
  double final_objective = 0.0;
  CorrespondenceSet correspondences;  // from the last ICP iteration
  OptimizerReport last_optimizer;
  FitStages stages;
};

struct FitResult {
  RigidSpdTransform transform;
  FitReport report;
};

/// Principal square root E = (S T^-1)^1/2, computed as S^1/2 C^1/2 S^-1/2 with
/// the SPD matrix C = S^1/2 T^-1 S^1/2. Satisfies E T E^T = S.
Eigen::MatrixXd pt_matrix(const SpdMatrix& student_mean, const SpdMatrix& teacher_mean);

SpdCloud pt_initialize(const SpdCloud& targets, const SpdMatrix& student_mean, const SpdMatrix& teacher_mean);
SpdCloud recenter(const SpdCloud& cloud, const SpdMatrix& mean);
SpdCloud scale_dispersion(const SpdCloud& cloud, double exponent);
SpdCloud apply_rotation(const SpdCloud& cloud, const Rotation& r);
SpdCloud translate_to_source(const SpdCloud& cloud, const SpdMatrix& student_mean);

/// Fits teacher (targets) onto student (sources). Clouds may differ in size.
FitResult fit(const SpdCloud& sources, const SpdCloud& targets, const FitConfig& config = {});

/// Parallel transport alone: E-congruence onto the student mean, no ICP.
RigidSpdTransform fit_pt_only(const SpdCloud& sources, const SpdCloud& targets, const KarcherOptions& karcher = {});

/// Online transfer of teacher points into the student domain.
SpdCloud apply(const RigidSpdTransform& transform, const SpdCloud& new_targets);
SpdMatrix apply(const RigidSpdTransform& transform, const SpdMatrix& point);

}  // namespace spdicp
