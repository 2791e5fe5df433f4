#include "spdicp/rotation.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spdicp {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 60;
constexpr double kRelativeDecreaseTol = 1e-10;

double orthogonality_error(const Eigen::MatrixXd& r) {
  return (r.transpose() * r - Eigen::MatrixXd::Identity(r.rows(), r.cols())).norm();
}

// Nearest orthogonal matrix, R (R^T R)^-1/2.
Eigen::MatrixXd polar_cleanup(const Eigen::MatrixXd& r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.transpose() * r);
  const Eigen::MatrixXd inv_half =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return r * inv_half;
}

void check_pairs(std::span<const SpdMatrix> sources, std::span<const SpdMatrix> targets,
                 std::span<const double> weights) {
  if (sources.size() != targets.size() || sources.size() != weights.size())
    throw std::invalid_argument("rotation objective: sources, targets and weights must have equal lengths");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].dim() != sources.front().dim() || targets[i].dim() != sources.front().dim())
      throw std::invalid_argument("rotation objective: dimension mismatch");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw std::invalid_argument("rotation objective: weights must be finite and non-negative");
  }
}

void check_rotation(const Rotation& r, std::span<const SpdMatrix> sources) {
  if (!sources.empty() && r.dim() != sources.front().dim())
    throw std::invalid_argument("rotation objective: rotation dimension does not match the clouds");
}

// Objective and gradient share one eigendecomposition per pair; the source
// whitening S^-1/2 is computed once.
class PairedProblem {
 public:
  PairedProblem(std::span<const SpdMatrix> sources, std::span<const SpdMatrix> targets,
                std::span<const double> weights)
      : targets_(targets), weights_(weights) {
    check_pairs(sources, targets, weights);
    whiteners_.reserve(sources.size());
    for (const auto& s : sources) whiteners_.push_back(inv_sqrtm(s).matrix());
  }

  double value(const Eigen::MatrixXd& r) const { return dispatch(r, nullptr); }

  double value_and_gradient(const Eigen::MatrixXd& r, Eigen::MatrixXd& grad) const {
    grad.setZero(r.rows(), r.cols());
    return dispatch(r, &grad);
  }

 private:
  double dispatch(const Eigen::MatrixXd& r, Eigen::MatrixXd* grad) const {
    if (r.rows() == 2) return evaluate_fixed<2>(r, grad);
    if (r.rows() == 3) return evaluate_fixed<3>(r, grad);
    return evaluate(r, grad);
  }

  // Same computation with stack-allocated matrices, several times faster for
  // the common small dimensions.
  template <int N>
  double evaluate_fixed(const Eigen::MatrixXd& r_dyn, Eigen::MatrixXd* grad) const {
    using Mat = Eigen::Matrix<double, N, N>;
    using Vec = Eigen::Matrix<double, N, 1>;
    const Mat r = r_dyn;
    Mat g = Mat::Zero();
    double f = 0.0;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      const double w = weights_[i];
      if (w == 0.0) continue;
      const Mat wh = whiteners_[i];
      const Mat rt = r * Mat(targets_[i].matrix());
      Mat y = wh * rt * r.transpose() * wh;
      y = (0.5 * (y + y.transpose())).eval();
      Eigen::SelfAdjointEigenSolver<Mat> es(y, grad ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
      const Vec lambda = es.eigenvalues();
      const Vec logs = lambda.array().log().matrix();
      f += w * logs.squaredNorm();
      if (grad) {
        const Vec scaled = (2.0 * logs.array() / lambda.array()).matrix();
        const Mat gx = wh * es.eigenvectors() * scaled.asDiagonal() * es.eigenvectors().transpose() * wh;
        g += 2.0 * w * gx * rt;
      }
    }
    if (grad) *grad = g;
    return f;
  }

  double evaluate(const Eigen::MatrixXd& r, Eigen::MatrixXd* grad) const {
    double f = 0.0;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
      const double w = weights_[i];
      if (w == 0.0) continue;
      const Eigen::MatrixXd& wh = whiteners_[i];
      const Eigen::MatrixXd rt = r * targets_[i].matrix();
      Eigen::MatrixXd y = wh * rt * r.transpose() * wh;
      y = 0.5 * (y + y.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          y, grad ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
      const Eigen::VectorXd& lambda = es.eigenvalues();
      Eigen::VectorXd logs = lambda.array().log();
      f += w * logs.squaredNorm();
      if (grad) {
        // d/dX d^2(S, X) = S^-1/2 (2 log(Y) Y^-1) S^-1/2, with dX = dR T R^T + R T dR^T.
        const Eigen::VectorXd scaled = (2.0 * logs.array() / lambda.array()).matrix();
        const Eigen::MatrixXd gx = wh * es.eigenvectors() * scaled.asDiagonal() * es.eigenvectors().transpose() * wh;
        *grad += 2.0 * w * gx * rt;
      }
    }
    return f;
  }

  std::span<const SpdMatrix> targets_;
  std::span<const double> weights_;
  std::vector<Eigen::MatrixXd> whiteners_;
};

Eigen::MatrixXd skew_part(const Eigen::MatrixXd& a) { return 0.5 * (a - a.transpose()); }

Eigen::MatrixXd retract(const Eigen::MatrixXd& r, const Eigen::MatrixXd& xi, double step) {
  Eigen::MatrixXd out = r * Eigen::MatrixXd((-step * xi).exp());
  if (orthogonality_error(out) > 1e-13) out = polar_cleanup(out);
  return out;
}

struct RestartResult {
  Eigen::MatrixXd rotation;
  double objective = 0.0;
  std::vector<double> history;
  bool converged = false;
  int iterations = 0;
};

RestartResult descend(const PairedProblem& problem, Eigen::MatrixXd r, const RotationConfig& config) {
  RestartResult out;
  Eigen::MatrixXd grad;
  double f = problem.value_and_gradient(r, grad);
  out.history.push_back(f);

  Eigen::MatrixXd prev_xi;
  double prev_step = 0.0;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    const Eigen::MatrixXd xi = skew_part(r.transpose() * grad);
    const double xi_sq = xi.squaredNorm();
    if (std::sqrt(xi_sq) < config.grad_tol) {
      out.converged = true;
      break;
    }

    // Barzilai-Borwein trial step, safeguarded by Armijo backtracking.
    double step = config.step_init;
    if (iter > 0) {
      const Eigen::MatrixXd s = -prev_step * prev_xi;  // the retraction moves along -xi
      const Eigen::MatrixXd y = xi - prev_xi;
      const double sy = (s.array() * y.array()).sum();
      if (sy > 0.0) step = std::clamp(s.squaredNorm() / sy, 1e-12, 1e6);
    }

    Eigen::MatrixXd candidate;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int k = 0; k < kMaxBacktracks; ++k) {
      candidate = retract(r, xi, step);
      f_new = problem.value(candidate);
      if (f_new <= f - kArmijo * step * xi_sq) {
        accepted = true;
        break;
      }
      step *= kBacktrack;
    }
    if (!accepted) {
      // No representable descent left along the gradient.
      out.converged = true;
      break;
    }

    const double decrease = f - f_new;
    r = candidate;
    prev_xi = xi;
    prev_step = step;
    f = problem.value_and_gradient(r, grad);
    out.history.push_back(f);
    ++out.iterations;
    if (decrease <= kRelativeDecreaseTol * std::max(f + decrease, std::numeric_limits<double>::min())) {
      out.converged = true;
      break;
    }
  }
  out.rotation = std::move(r);
  out.objective = f;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rotation

Rotation::Rotation(const Eigen::MatrixXd& r) : r_(r) {
  if (r.rows() != r.cols() || r.rows() == 0) throw std::invalid_argument("Rotation: expected a square matrix");
  if (!(orthogonality_error(r) < 1e-10)) throw std::invalid_argument("Rotation: matrix is not orthogonal");
  if (!(r.determinant() > 0.0)) throw std::invalid_argument("Rotation: determinant is not +1");
}

Rotation Rotation::identity(Eigen::Index dim) { return Rotation(Eigen::MatrixXd::Identity(dim, dim), TrustedTag{}); }

Rotation Rotation::random(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j)
    if (rr(j, j) < 0.0) q.col(j) *= -1.0;
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return Rotation(q, TrustedTag{});
}

Rotation Rotation::planar(Eigen::Index dim, Eigen::Index i, Eigen::Index j, double angle) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(dim, dim);
  r(i, i) = std::cos(angle);
  r(j, j) = std::cos(angle);
  r(i, j) = -std::sin(angle);
  r(j, i) = std::sin(angle);
  return Rotation(r);
}

Rotation Rotation::operator*(const Rotation& other) const {
  Eigen::MatrixXd out = r_ * other.r_;
  if (orthogonality_error(out) > 1e-13) out = polar_cleanup(out);
  return Rotation(std::move(out), TrustedTag{});
}

Rotation Rotation::transpose() const { return Rotation(r_.transpose(), TrustedTag{}); }

double rotation_angle(const Rotation& r) {
  const Eigen::Index d = r.dim();
  const double chord = (r.matrix() - Eigen::MatrixXd::Identity(d, d)).norm() / (2.0 * std::sqrt(2.0));
  return 2.0 * std::asin(std::min(1.0, chord));
}

// ---------------------------------------------------------------------------
// Objective and gradient

double objective(const Rotation& r, std::span<const SpdMatrix> sources, std::span<const SpdMatrix> targets,
                 std::span<const double> weights) {
  check_pairs(sources, targets, weights);
  check_rotation(r, sources);
  double f = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (weights[i] == 0.0) continue;
    f += weights[i] * dist_squared(sources[i], congruence(r.matrix(), targets[i]));
  }
  return f;
}

Eigen::MatrixXd euclidean_gradient(const Rotation& r, std::span<const SpdMatrix> sources,
                                   std::span<const SpdMatrix> targets, std::span<const double> weights) {
  check_rotation(r, sources);
  PairedProblem problem(sources, targets, weights);
  Eigen::MatrixXd grad;
  problem.value_and_gradient(r.matrix(), grad);
  return grad;
}

Eigen::MatrixXd riemannian_gradient(const Rotation& r, const Eigen::MatrixXd& ambient_grad) {
  return skew_part(r.matrix().transpose() * ambient_grad);
}

Rotation riemannian_step(const Rotation& r, const Eigen::MatrixXd& ambient_grad, double step) {
  const Eigen::MatrixXd xi = riemannian_gradient(r, ambient_grad);
  return Rotation(retract(r.matrix(), xi, step), Rotation::TrustedTag{});
}

// ---------------------------------------------------------------------------
// Multi-start descent

OptimizerReport optimize(std::span<const SpdMatrix> sources, std::span<const SpdMatrix> targets,
                         std::span<const double> weights, const RotationConfig& config) {
  if (sources.empty()) throw std::invalid_argument("optimize: no pairs");
  if (config.restarts < 1) throw std::invalid_argument("optimize: restarts must be >= 1");
  const Eigen::Index d = sources.front().dim();
  const PairedProblem problem(sources, targets, weights);

  OptimizerReport report;
  report.restarts = config.restarts;
  bool have_best = false;
  RestartResult best;
  for (int k = 0; k < config.restarts; ++k) {
    Eigen::MatrixXd start = Eigen::MatrixXd::Identity(d, d);
    if (k > 0) {
      std::seed_seq seq{static_cast<std::uint32_t>(config.seed & 0xffffffffu),
                        static_cast<std::uint32_t>(config.seed >> 32), static_cast<std::uint32_t>(k)};
      std::mt19937_64 rng(seq);
      start = Rotation::random(d, rng).matrix();
    }
    RestartResult result = descend(problem, start, config);
    report.total_iterations += result.iterations;
    if (!have_best || result.objective < best.objective) {
      best = std::move(result);
      report.best_restart = k;
      have_best = true;
    }
  }
  report.best_rotation = Rotation(best.rotation);
  report.best_objective = best.objective;
  report.objective_history = std::move(best.history);
  report.converged = best.converged;
  report.iterations = best.iterations;
  return report;
}

}  // namespace spdicp
