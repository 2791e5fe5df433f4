#pragma once

// Nearest-neighbour transfer baseline and the dispersion-normalized RMSE.

#include "spdicp/kinematics.hpp"
#include "spdicp/spd.hpp"

#include <map>
#include <optional>
#include <vector>

namespace spdicp {

/// Exact nearest neighbour under the affine-invariant distance.
///
/// Points are bucketed into voxels of their sorted log-eigenvalues. The
/// Euclidean distance between sorted log-spectra never exceeds the
/// affine-invariant distance, so a voxel (or a single point) whose spectral
/// bound exceeds the best distance found so far cannot hold the answer and is
/// skipped. Results equal a full scan, including the lowest-index tie-break.
class NnIndex {
 public:
  explicit NnIndex(const SpdCloud& points, double voxel_size = 0.5);

  struct Hit {
    std::size_t index = 0;
    double distance = 0.0;
  };

  Hit nearest(const SpdMatrix& query) const;
  Hit nearest_brute_force(const SpdMatrix& query) const;

  const SpdCloud& points() const { return points_; }
  const std::vector<std::vector<int>>& keys() const { return keys_; }
  double voxel_size() const { return voxel_size_; }
  /// Distance evaluations performed by the last nearest() call.
  std::size_t last_evaluations() const { return last_evaluations_; }

 private:
  SpdCloud points_;
  double voxel_size_;
  std::vector<Eigen::VectorXd> spectra_;  // ascending log-eigenvalues
  std::vector<std::vector<int>> keys_;
  std::map<std::vector<int>, std::vector<std::size_t>> voxels_;
  mutable std::size_t last_evaluations_ = 0;
};

/// Sorted log-eigenvalues of m.
Eigen::VectorXd log_spectrum(const SpdMatrix& m);

struct NnTransferMap {
  SpdCloud teacher_samples;
  SpdCloud student_samples;
  std::vector<std::size_t> pair_index;  // teacher sample -> nearest student sample
  double voxel_size = 0.5;
};

/// Samples n manipulabilities from each model with the same seed and pairs
/// every teacher sample with its nearest student sample.
NnTransferMap build_nn_map(const SerialManipulator& teacher, const SerialManipulator& student, std::size_t n,
                           std::uint64_t seed);
NnTransferMap build_nn_map(const SpdCloud& teacher_samples, const SpdCloud& student_samples);

/// Pre-built query structure over a transfer map.
class BaselineTransfer {
 public:
  explicit BaselineTransfer(NnTransferMap map);
  SpdCloud transfer(const SpdCloud& new_points) const;
  const NnTransferMap& map() const { return map_; }

 private:
  NnTransferMap map_;
  NnIndex teacher_index_;
};

/// new point -> nearest teacher sample -> its paired student sample.
SpdCloud baseline_transfer(const NnTransferMap& map, const SpdCloud& new_points);

struct EvalReport {
  double rmse = 0.0;
  double dispersion_after = 0.0;  // normalizer: predicted cloud about its own mean
  std::vector<double> per_point_distances;
  std::optional<int> iterations;
  std::optional<double> baseline_dispersion;  // dispersion of a baseline cloud, if supplied
  std::optional<double> rmse_baseline_normalized;
};

/// (1/c) sqrt(mean_i d^2(predicted_i, reference_i)), c = dispersion of predicted
/// about its geometric mean. Throws std::domain_error when c = 0.
EvalReport rmse(const SpdCloud& predicted, const SpdCloud& reference);

/// As rmse(), additionally normalizing by the dispersion of baseline_cloud.
EvalReport rmse(const SpdCloud& predicted, const SpdCloud& reference, const SpdCloud& baseline_cloud);

}  // namespace spdicp
