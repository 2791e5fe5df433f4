#pragma once

// Weighted rotation alignment of paired SPD clouds: minimizes
//   f(R) = sum_i w_i d^2(S_i, R T_i R^T)
// by multi-start steepest descent on SO(D) with exponential retraction.

#include "spdicp/spd.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace spdicp {

class Rotation {
 public:
  /// Throws std::invalid_argument unless ||R^T R - I||_F < 1e-10 and det(R) > 0.
  explicit Rotation(const Eigen::MatrixXd& r);

  static Rotation identity(Eigen::Index dim);
  /// Haar-uniform sample: QR of a Gaussian matrix with sign and determinant fix.
  static Rotation random(Eigen::Index dim, std::mt19937_64& rng);
  /// Planar rotation by angle in the (i, j) coordinate plane.
  static Rotation planar(Eigen::Index dim, Eigen::Index i, Eigen::Index j, double angle);

  const Eigen::MatrixXd& matrix() const { return r_; }
  Eigen::Index dim() const { return r_.rows(); }

  Rotation operator*(const Rotation& other) const;
  Rotation transpose() const;

 private:
  struct TrustedTag {};
  Rotation(Eigen::MatrixXd r, TrustedTag) : r_(std::move(r)) {}
  friend Rotation riemannian_step(const Rotation&, const Eigen::MatrixXd&, double);
  Eigen::MatrixXd r_;
};

/// Angle of a single-plane rotation recovered from ||R - I||_F.
double rotation_angle(const Rotation& r);

double objective(const Rotation& r, std::span<const SpdMatrix> sources, std::span<const SpdMatrix> targets,
                 std::span<const double> weights);

/// Gradient of objective() with respect to the ambient entries of R.
Eigen::MatrixXd euclidean_gradient(const Rotation& r, std::span<const SpdMatrix> sources,
                                   std::span<const SpdMatrix> targets, std::span<const double> weights);

/// Skew part of R^T G: the gradient expressed in the Lie algebra at R.
Eigen::MatrixXd riemannian_gradient(const Rotation& r, const Eigen::MatrixXd& ambient_grad);

/// R * exp(-step * skew(R^T G)).
Rotation riemannian_step(const Rotation& r, const Eigen::MatrixXd& ambient_grad, double step);

struct RotationConfig {
  int restarts = 8;  // identity plus (restarts - 1) random starts
  int max_iter = 100;
  double grad_tol = 1e-7;
  double step_init = 1.0;
  std::uint64_t seed = 0;
};

struct OptimizerReport {
  Rotation best_rotation = Rotation::identity(1);
  double best_objective = 0.0;
  std::vector<double> objective_history;  // best restart, one entry per iterate
  int restarts = 0;
  int best_restart = 0;
  bool converged = false;
  int iterations = 0;        // iterations of the best restart
  int total_iterations = 0;  // summed over restarts
};

OptimizerReport optimize(std::span<const SpdMatrix> sources, std::span<const SpdMatrix> targets,
                         std::span<const double> weights, const RotationConfig& config = {});

}  // namespace spdicp
