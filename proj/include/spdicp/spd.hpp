#pragma once

// Riemannian geometry of symmetric positive-definite matrices under the
// affine-invariant metric. Every matrix function goes through a symmetric
// eigendecomposition.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spdicp {

/// Raised when an iterative mean fails to reach its tolerance.
class KarcherNonConvergence : public std::runtime_error {
 public:
  KarcherNonConvergence(Eigen::MatrixXd last_iterate, double residual, int iterations);

  const Eigen::MatrixXd& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::MatrixXd last_iterate_;
  double residual_;
  int iterations_;
};

/// True when |m_ij - m_ji| <= tol * max(1, |m_ij|) for every entry.
bool is_symmetric(const Eigen::MatrixXd& m, double tol = 1e-12);

/// A point on the SPD manifold. Entries are stored exactly symmetric.
class SpdMatrix {
 public:
  /// Validates symmetry (relative 1e-12) and positive definiteness, then
  /// symmetrizes exactly. Throws std::invalid_argument / std::domain_error.
  explicit SpdMatrix(const Eigen::MatrixXd& m);

  /// Same as the constructor with a caller-chosen symmetry tolerance.
  static SpdMatrix validated(const Eigen::MatrixXd& m, double symmetry_tol);

  /// For results that are SPD by construction (congruences, spectral maps with
  /// positive image). Symmetrizes but skips the definiteness check.
  static SpdMatrix trusted(const Eigen::MatrixXd& m);

  static SpdMatrix identity(Eigen::Index dim);
  static SpdMatrix diagonal(const Eigen::VectorXd& diag);

  const Eigen::MatrixXd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  struct TrustedTag {};
  SpdMatrix(Eigen::MatrixXd m, TrustedTag);
  Eigen::MatrixXd m_;
};

/// Tangent vector: a symmetric matrix attached to a base point.
class SymmetricTangent {
 public:
  SymmetricTangent(const Eigen::MatrixXd& entries, SpdMatrix base);

  const Eigen::MatrixXd& entries() const { return l_; }
  const SpdMatrix& base() const { return base_; }
  Eigen::Index dim() const { return l_.rows(); }

 private:
  Eigen::MatrixXd l_;
  SpdMatrix base_;
};

/// Ordered, non-empty set of SPD points sharing one dimension.
class SpdCloud {
 public:
  explicit SpdCloud(std::vector<SpdMatrix> points, std::vector<std::string> labels = {});

  std::size_t size() const { return points_.size(); }
  Eigen::Index dim() const { return points_.front().dim(); }
  const SpdMatrix& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<SpdMatrix>& points() const { return points_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }

  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  /// Applies fn to every point; labels are carried over.
  SpdCloud map(const std::function<SpdMatrix(const SpdMatrix&)>& fn) const;
  /// Sub-cloud at the given indices (labels follow).
  SpdCloud subset(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<SpdMatrix> points_;
  std::vector<std::string> labels_;
};

struct SymEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Symmetric eigendecomposition. Throws std::invalid_argument on asymmetric input.
SymEig sym_eig(const Eigen::MatrixXd& m);

enum class MatFnKind { Log, Exp, Sqrt, InvSqrt, Pow };

struct MatFn {
  MatFnKind kind;
  double exponent = 1.0;

  static MatFn log() { return {MatFnKind::Log}; }
  static MatFn exp() { return {MatFnKind::Exp}; }
  static MatFn sqrt() { return {MatFnKind::Sqrt}; }
  static MatFn inv_sqrt() { return {MatFnKind::InvSqrt}; }
  static MatFn pow(double s) { return {MatFnKind::Pow, s}; }
};

/// V diag(f(lambda)) V^T for symmetric input. Everything except exp requires
/// positive eigenvalues (std::domain_error otherwise).
Eigen::MatrixXd mat_fn(const Eigen::MatrixXd& m, const MatFn& f);

Eigen::MatrixXd logm(const SpdMatrix& m);
SpdMatrix expm(const Eigen::MatrixXd& symmetric);
SpdMatrix sqrtm(const SpdMatrix& m);
SpdMatrix inv_sqrtm(const SpdMatrix& m);
SpdMatrix powm(const SpdMatrix& m, double s);
SpdMatrix inverse(const SpdMatrix& m);

/// A M A^T for any invertible A.
SpdMatrix congruence(const Eigen::MatrixXd& a, const SpdMatrix& m);

/// Affine-invariant distance ||log(a^-1/2 b a^-1/2)||_F.
double dist(const SpdMatrix& a, const SpdMatrix& b);
double dist_squared(const SpdMatrix& a, const SpdMatrix& b);

/// <base^-1/2 l1 base^-1/2, base^-1/2 l2 base^-1/2>_F.
double inner(const SymmetricTangent& l1, const SymmetricTangent& l2, const SpdMatrix& base);
double inner(const Eigen::MatrixXd& l1, const Eigen::MatrixXd& l2, const SpdMatrix& base);

SymmetricTangent log_map(const SpdMatrix& m, const SpdMatrix& base);
SpdMatrix exp_map(const SymmetricTangent& l);
SpdMatrix exp_map(const Eigen::MatrixXd& l, const SpdMatrix& base);

struct GeodesicPoint {
  SpdMatrix point;
  bool extrapolated;  // t outside [0, 1]
};

/// a^1/2 (a^-1/2 b a^-1/2)^t a^1/2.
GeodesicPoint geodesic(const SpdMatrix& a, const SpdMatrix& b, double t);

struct KarcherOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

/// Karcher mean. N = 1 and N = 2 are closed form; larger sets use the
/// fixed-point iteration (unit first step, then Barzilai-Borwein scaled with
/// cost backtracking) and throw KarcherNonConvergence past max_iter. The
/// tolerance is raised to the rounding floor 8 eps max_i cond(M_i) for very
/// ill-conditioned input.
SpdMatrix geometric_mean(const SpdCloud& cloud, const KarcherOptions& options = {});

/// Mean (unsquared) distance of the cloud's points to center.
double dispersion(const SpdCloud& cloud, const SpdMatrix& center);

/// Clamps eigenvalues below floor up to floor.
SpdMatrix project_to_spd(const Eigen::MatrixXd& symmetric, double floor = 1e-4);

/// Relative Frobenius error ||a - b|| / max(1, ||b||).
double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace spdicp
