#include "spdicp/spd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spdicp {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void require_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw std::invalid_argument(os.str());
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(os.str());
  }
}

Eigen::MatrixXd spectral(const SymEig& eig, const Eigen::VectorXd& mapped) {
  return eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
}

// Eigenvalues of a^-1/2 b a^-1/2, via the similar matrix L^-1 b L^-T with a = L L^T.
Eigen::VectorXd relative_eigenvalues(const SpdMatrix& a, const SpdMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "dist");
  Eigen::LLT<Eigen::MatrixXd> llt(a.matrix());
  if (llt.info() != Eigen::Success) throw std::domain_error("dist: Cholesky factorization failed");
  const auto lower = llt.matrixL();
  Eigen::MatrixXd y = lower.solve(b.matrix());
  Eigen::MatrixXd c = lower.solve(y.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(c), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

KarcherNonConvergence::KarcherNonConvergence(Eigen::MatrixXd last_iterate, double residual, int iterations)
    : std::runtime_error("geometric_mean: no convergence after " + std::to_string(iterations) +
                         " iterations (residual " + std::to_string(residual) + ")"),
      last_iterate_(std::move(last_iterate)),
      residual_(residual),
      iterations_(iterations) {}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double scale = std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))});
      if (!(std::abs(m(i, j) - m(j, i)) <= tol * scale)) return false;
    }
  }
  return m.allFinite();
}

// ---------------------------------------------------------------------------
// SpdMatrix / SymmetricTangent / SpdCloud

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m) : SpdMatrix(validated(m, 1e-12)) {}

SpdMatrix::SpdMatrix(Eigen::MatrixXd m, TrustedTag) : m_(std::move(m)) {}

SpdMatrix SpdMatrix::validated(const Eigen::MatrixXd& m, double symmetry_tol) {
  require_square(m, "SpdMatrix");
  if (!is_symmetric(m, symmetry_tol)) throw std::invalid_argument("SpdMatrix: input is not symmetric");
  Eigen::MatrixXd s = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) > 0.0)) {
    std::ostringstream os;
    os << "SpdMatrix: not positive definite (smallest eigenvalue " << es.eigenvalues()(0) << ")";
    throw std::domain_error(os.str());
  }
  return SpdMatrix(std::move(s), TrustedTag{});
}

SpdMatrix SpdMatrix::trusted(const Eigen::MatrixXd& m) { return SpdMatrix(symmetrized(m), TrustedTag{}); }

SpdMatrix SpdMatrix::identity(Eigen::Index dim) {
  if (dim <= 0) throw std::invalid_argument("SpdMatrix::identity: dimension must be positive");
  return SpdMatrix(Eigen::MatrixXd::Identity(dim, dim), TrustedTag{});
}

SpdMatrix SpdMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SpdMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SymmetricTangent::SymmetricTangent(const Eigen::MatrixXd& entries, SpdMatrix base)
    : l_(), base_(std::move(base)) {
  require_square(entries, "SymmetricTangent");
  require_same_dim(entries.rows(), base_.dim(), "SymmetricTangent");
  if (!is_symmetric(entries, 1e-12)) throw std::invalid_argument("SymmetricTangent: entries are not symmetric");
  l_ = symmetrized(entries);
}

SpdCloud::SpdCloud(std::vector<SpdMatrix> points, std::vector<std::string> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (points_.empty()) throw std::invalid_argument("SpdCloud: cloud must be non-empty");
  const Eigen::Index d = points_.front().dim();
  for (const auto& p : points_) require_same_dim(p.dim(), d, "SpdCloud");
  if (!labels_.empty() && labels_.size() != points_.size())
    throw std::invalid_argument("SpdCloud: label count does not match point count");
}

SpdCloud SpdCloud::map(const std::function<SpdMatrix(const SpdMatrix&)>& fn) const {
  std::vector<SpdMatrix> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(fn(p));
  return SpdCloud(std::move(out), labels_);
}

SpdCloud SpdCloud::subset(const std::vector<std::size_t>& indices) const {
  std::vector<SpdMatrix> pts;
  std::vector<std::string> lbl;
  pts.reserve(indices.size());
  for (std::size_t i : indices) {
    pts.push_back(points_.at(i));
    if (has_labels()) lbl.push_back(labels_[i]);
  }
  return SpdCloud(std::move(pts), std::move(lbl));
}

// ---------------------------------------------------------------------------
// Matrix functions

SymEig sym_eig(const Eigen::MatrixXd& m) {
  require_square(m, "sym_eig");
  if (!is_symmetric(m, 1e-12)) throw std::invalid_argument("sym_eig: input is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m));
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::MatrixXd mat_fn(const Eigen::MatrixXd& m, const MatFn& f) {
  const SymEig eig = sym_eig(m);
  if (f.kind != MatFnKind::Exp && !(eig.values(0) > 0.0)) {
    std::ostringstream os;
    os << "mat_fn: matrix is not positive definite (smallest eigenvalue " << eig.values(0) << ")";
    throw std::domain_error(os.str());
  }
  Eigen::VectorXd mapped(eig.values.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    const double l = eig.values(i);
    switch (f.kind) {
      case MatFnKind::Log: mapped(i) = std::log(l); break;
      case MatFnKind::Exp: mapped(i) = std::exp(l); break;
      case MatFnKind::Sqrt: mapped(i) = std::sqrt(l); break;
      case MatFnKind::InvSqrt: mapped(i) = 1.0 / std::sqrt(l); break;
      case MatFnKind::Pow: mapped(i) = std::pow(l, f.exponent); break;
    }
  }
  return symmetrized(spectral(eig, mapped));
}

Eigen::MatrixXd logm(const SpdMatrix& m) { return mat_fn(m.matrix(), MatFn::log()); }
SpdMatrix expm(const Eigen::MatrixXd& symmetric) { return SpdMatrix::trusted(mat_fn(symmetric, MatFn::exp())); }
SpdMatrix sqrtm(const SpdMatrix& m) { return SpdMatrix::trusted(mat_fn(m.matrix(), MatFn::sqrt())); }
SpdMatrix inv_sqrtm(const SpdMatrix& m) { return SpdMatrix::trusted(mat_fn(m.matrix(), MatFn::inv_sqrt())); }
SpdMatrix powm(const SpdMatrix& m, double s) { return SpdMatrix::trusted(mat_fn(m.matrix(), MatFn::pow(s))); }
SpdMatrix inverse(const SpdMatrix& m) { return SpdMatrix::trusted(mat_fn(m.matrix(), MatFn::pow(-1.0))); }

SpdMatrix congruence(const Eigen::MatrixXd& a, const SpdMatrix& m) {
  require_same_dim(a.cols(), m.dim(), "congruence");
  require_same_dim(a.rows(), a.cols(), "congruence");
  return SpdMatrix::trusted(a * m.matrix() * a.transpose());
}

// ---------------------------------------------------------------------------
// Metric

double dist_squared(const SpdMatrix& a, const SpdMatrix& b) {
  const Eigen::VectorXd lambda = relative_eigenvalues(a, b);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double l = std::log(lambda(i));
    sum += l * l;
  }
  return sum;
}

double dist(const SpdMatrix& a, const SpdMatrix& b) { return std::sqrt(dist_squared(a, b)); }

double inner(const Eigen::MatrixXd& l1, const Eigen::MatrixXd& l2, const SpdMatrix& base) {
  require_same_dim(l1.rows(), base.dim(), "inner");
  require_same_dim(l2.rows(), base.dim(), "inner");
  const Eigen::MatrixXd w = mat_fn(base.matrix(), MatFn::inv_sqrt());
  const Eigen::MatrixXd a = w * l1 * w;
  const Eigen::MatrixXd b = w * l2 * w;
  return (a.array() * b.array()).sum();
}

double inner(const SymmetricTangent& l1, const SymmetricTangent& l2, const SpdMatrix& base) {
  return inner(l1.entries(), l2.entries(), base);
}

SymmetricTangent log_map(const SpdMatrix& m, const SpdMatrix& base) {
  require_same_dim(m.dim(), base.dim(), "log_map");
  const SymEig eig = sym_eig(base.matrix());
  const Eigen::MatrixXd half = spectral(eig, eig.values.cwiseSqrt());
  const Eigen::MatrixXd inv_half = spectral(eig, eig.values.cwiseSqrt().cwiseInverse());
  const Eigen::MatrixXd inner_log = mat_fn(symmetrized(inv_half * m.matrix() * inv_half), MatFn::log());
  return SymmetricTangent(symmetrized(half * inner_log * half), base);
}

SpdMatrix exp_map(const Eigen::MatrixXd& l, const SpdMatrix& base) {
  require_same_dim(l.rows(), base.dim(), "exp_map");
  if (!is_symmetric(l, 1e-12)) throw std::invalid_argument("exp_map: tangent is not symmetric");
  const SymEig eig = sym_eig(base.matrix());
  const Eigen::MatrixXd half = spectral(eig, eig.values.cwiseSqrt());
  const Eigen::MatrixXd inv_half = spectral(eig, eig.values.cwiseSqrt().cwiseInverse());
  const Eigen::MatrixXd inner_exp = mat_fn(symmetrized(inv_half * l * inv_half), MatFn::exp());
  return SpdMatrix::trusted(half * inner_exp * half);
}

SpdMatrix exp_map(const SymmetricTangent& l) { return exp_map(l.entries(), l.base()); }

GeodesicPoint geodesic(const SpdMatrix& a, const SpdMatrix& b, double t) {
  require_same_dim(a.dim(), b.dim(), "geodesic");
  const SymEig eig = sym_eig(a.matrix());
  const Eigen::MatrixXd half = spectral(eig, eig.values.cwiseSqrt());
  const Eigen::MatrixXd inv_half = spectral(eig, eig.values.cwiseSqrt().cwiseInverse());
  const Eigen::MatrixXd inner_pow = mat_fn(symmetrized(inv_half * b.matrix() * inv_half), MatFn::pow(t));
  return {SpdMatrix::trusted(half * inner_pow * half), t < 0.0 || t > 1.0};
}

SpdMatrix geometric_mean(const SpdCloud& cloud, const KarcherOptions& options) {
  const std::size_t n = cloud.size();
  if (n == 1) return cloud[0];
  if (n == 2) return geodesic(cloud[0], cloud[1], 0.5).point;

  // Log-Euclidean mean as the starting point.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(cloud.dim(), cloud.dim());
  for (const auto& p : cloud) acc += logm(p);
  Eigen::MatrixXd x = mat_fn(symmetrized(acc / static_cast<double>(n)), MatFn::exp());

  // The first step is the unit fixed-point step. Later steps are rescaled by a
  // Barzilai-Borwein estimate (the unit step converges slowly or oscillates on
  // widely spread clouds), and halved whenever the Frechet cost grows.
  // Whitening an ill-conditioned point loses about eps * cond digits, so the
  // residual cannot be driven below that floor.
  double max_cond = 1.0;
  for (const auto& p : cloud) {
    const Eigen::VectorXd ev = sym_eig(p.matrix()).values;
    max_cond = std::max(max_cond, ev.maxCoeff() / ev.minCoeff());
  }
  const double tol = std::max(options.tol, 8.0 * std::numeric_limits<double>::epsilon() * max_cond);

  double residual = 0.0;
  double accepted_cost = std::numeric_limits<double>::infinity();
  double accepted_residual = residual;
  double t = 1.0;
  Eigen::MatrixXd accepted = x, accepted_half, accepted_step;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const SymEig eig = sym_eig(x);
    const Eigen::MatrixXd half = spectral(eig, eig.values.cwiseSqrt());
    const Eigen::MatrixXd inv_half = spectral(eig, eig.values.cwiseSqrt().cwiseInverse());

    Eigen::MatrixXd step = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    double cost = 0.0;
    for (const auto& p : cloud) {
      const Eigen::MatrixXd l = mat_fn(symmetrized(inv_half * p.matrix() * inv_half), MatFn::log());
      step += l;
      cost += l.squaredNorm();
    }
    step /= static_cast<double>(n);

    // Riemannian norm of the mean tangent at x.
    residual = step.norm();
    if (residual < tol) return SpdMatrix::trusted(x);
    if (cost > accepted_cost + 1e-10 * (1.0 + accepted_cost) && t > 1e-8) {
      t *= 0.5;
      x = symmetrized(accepted_half * mat_fn(t * accepted_step, MatFn::exp()) * accepted_half);
      continue;
    }
    if (std::isfinite(accepted_cost)) {
      const Eigen::MatrixXd moved = t * accepted_step;
      const double curvature = moved.cwiseProduct(accepted_step - step).sum();
      t = curvature > 0.0 ? std::clamp(moved.squaredNorm() / curvature, 0.05, 20.0) : 1.0;
    }
    accepted = x;
    accepted_half = half;
    accepted_step = step;
    accepted_cost = cost;
    accepted_residual = residual;
    x = symmetrized(half * mat_fn(t * step, MatFn::exp()) * half);
  }
  throw KarcherNonConvergence(accepted, accepted_residual, options.max_iter);
}

double dispersion(const SpdCloud& cloud, const SpdMatrix& center) {
  double sum = 0.0;
  for (const auto& p : cloud) sum += dist(p, center);
  return sum / static_cast<double>(cloud.size());
}

SpdMatrix project_to_spd(const Eigen::MatrixXd& symmetric, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("project_to_spd: floor must be positive");
  const SymEig eig = sym_eig(symmetric);
  if (eig.values(0) >= floor) return SpdMatrix::trusted(symmetric);
  const Eigen::VectorXd clamped = eig.values.cwiseMax(floor);
  return SpdMatrix::trusted(spectral(eig, clamped));
}

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace spdicp
