#include "spdicp/registration.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spdicp {

namespace {

SpdCloud congruence_all(const SpdCloud& cloud, const Eigen::MatrixXd& a) {
  return cloud.map([&a](const SpdMatrix& m) { return congruence(a, m); });
}

std::uint64_t iteration_seed(std::uint64_t seed, int iteration) {
  // splitmix64 step keeps per-iteration streams distinct and reproducible.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(iteration + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

RigidSpdTransform RigidSpdTransform::identity(Eigen::Index dim) {
  return {SpdMatrix::identity(dim), SpdMatrix::identity(dim), SpdMatrix::identity(dim), 1.0,
          Rotation::identity(dim), std::nullopt};
}

Eigen::MatrixXd pt_matrix(const SpdMatrix& student_mean, const SpdMatrix& teacher_mean) {
  if (student_mean.dim() != teacher_mean.dim()) throw std::invalid_argument("pt_matrix: dimension mismatch");
  const SymEig eig = sym_eig(student_mean.matrix());
  const Eigen::MatrixXd half = eig.vectors * eig.values.cwiseSqrt().asDiagonal() * eig.vectors.transpose();
  const Eigen::MatrixXd inv_half =
      eig.vectors * eig.values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.vectors.transpose();
  const Eigen::MatrixXd c = half * inverse(teacher_mean).matrix() * half;
  const Eigen::MatrixXd c_half = mat_fn(0.5 * (c + c.transpose()), MatFn::sqrt());
  Eigen::MatrixXd e = half * c_half * inv_half;
  if (!e.allFinite()) throw std::domain_error("pt_matrix: principal square root failed");
  return e;
}

SpdCloud pt_initialize(const SpdCloud& targets, const SpdMatrix& student_mean, const SpdMatrix& teacher_mean) {
  if (targets.dim() != student_mean.dim()) throw std::invalid_argument("pt_initialize: dimension mismatch");
  return congruence_all(targets, pt_matrix(student_mean, teacher_mean));
}

SpdCloud recenter(const SpdCloud& cloud, const SpdMatrix& mean) {
  if (cloud.dim() != mean.dim()) throw std::invalid_argument("recenter: dimension mismatch");
  return congruence_all(cloud, inv_sqrtm(mean).matrix());
}

SpdCloud scale_dispersion(const SpdCloud& cloud, double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent))
    throw std::invalid_argument("scale_dispersion: exponent must be positive");
  if (exponent == 1.0) return cloud;
  return cloud.map([exponent](const SpdMatrix& m) { return powm(m, exponent); });
}

SpdCloud apply_rotation(const SpdCloud& cloud, const Rotation& r) {
  if (cloud.dim() != r.dim()) throw std::invalid_argument("apply_rotation: dimension mismatch");
  return congruence_all(cloud, r.matrix());
}

SpdCloud translate_to_source(const SpdCloud& cloud, const SpdMatrix& student_mean) {
  if (cloud.dim() != student_mean.dim()) throw std::invalid_argument("translate_to_source: dimension mismatch");
  return congruence_all(cloud, sqrtm(student_mean).matrix());
}

SpdCloud apply(const RigidSpdTransform& transform, const SpdCloud& new_targets) {
  if (new_targets.dim() != transform.dim()) throw std::invalid_argument("apply: dimension mismatch");
  SpdCloud x = transform.pt_matrix ? congruence_all(new_targets, *transform.pt_matrix) : new_targets;
  x = recenter(x, transform.centering_mean);
  x = scale_dispersion(x, transform.scale_exponent);
  x = apply_rotation(x, transform.rotation);
  return translate_to_source(x, transform.student_mean);
}

SpdMatrix apply(const RigidSpdTransform& transform, const SpdMatrix& point) {
  return apply(transform, SpdCloud({point}))[0];
}

RigidSpdTransform fit_pt_only(const SpdCloud& sources, const SpdCloud& targets, const KarcherOptions& karcher) {
  if (sources.dim() != targets.dim()) throw std::invalid_argument("fit_pt_only: dimension mismatch");
  const SpdMatrix student_mean = geometric_mean(sources, karcher);
  const SpdMatrix teacher_mean = geometric_mean(targets, karcher);
  Eigen::MatrixXd e = pt_matrix(student_mean, teacher_mean);
  const SpdMatrix centering_mean = geometric_mean(congruence_all(targets, e), karcher);
  return {teacher_mean, centering_mean, student_mean, 1.0, Rotation::identity(sources.dim()), std::move(e)};
}

FitResult fit(const SpdCloud& sources, const SpdCloud& targets, const FitConfig& config) {
  if (sources.dim() != targets.dim()) throw std::invalid_argument("fit: dimension mismatch");
  if (config.icp_max_iter < 1) throw std::invalid_argument("fit: icp_max_iter must be >= 1");
  const Eigen::Index d = sources.dim();

  const SpdMatrix student_mean = geometric_mean(sources, config.karcher);
  const SpdMatrix teacher_mean = geometric_mean(targets, config.karcher);

  std::optional<Eigen::MatrixXd> e;
  std::optional<SpdCloud> transported;
  SpdMatrix centering_mean = teacher_mean;
  if (config.use_pt) {
    e = pt_matrix(student_mean, teacher_mean);
    transported = congruence_all(targets, *e);
    centering_mean = geometric_mean(*transported, config.karcher);
  }

  // Step 1: recenter at the identity.
  const SpdCloud src_rct = recenter(sources, student_mean);
  const SpdCloud tgt_rct = recenter(transported ? *transported : targets, centering_mean);

  // Step 2: match dispersions with a matrix power.
  const SpdMatrix eye = SpdMatrix::identity(d);
  const double c_s = dispersion(src_rct, eye);
  const double c_t = dispersion(tgt_rct, eye);
  const double s = (c_t > 0.0 && c_s > 0.0) ? c_s / c_t : 1.0;
  const SpdCloud tgt_scl = scale_dispersion(tgt_rct, s);

  // Step 3: alternate correspondence matching and rotation alignment.
  const std::vector<EllipsoidFeatures> src_features = features_of(src_rct);
  SpdCloud current = tgt_scl;
  Rotation total = Rotation::identity(d);
  std::vector<double> history, updates;
  CorrespondenceSet corr;
  OptimizerReport last;
  bool converged = false;
  int iterations = 0;
  for (int it = 0; it < config.icp_max_iter; ++it) {
    corr = match_features(features_of(current), src_features, config.weight_exponent, config.match_mode);
    std::vector<SpdMatrix> paired_sources;
    paired_sources.reserve(corr.pairs.size());
    for (const auto& [ti, si] : corr.pairs) paired_sources.push_back(src_rct[si]);

    RotationConfig rc = config.rotation;
    rc.seed = iteration_seed(config.seed, it);
    last = optimize(paired_sources, current.points(), corr.weights, rc);

    current = apply_rotation(current, last.best_rotation);
    total = last.best_rotation * total;
    const double angle = rotation_angle(last.best_rotation);
    ++iterations;
    updates.push_back(angle);
    const double prev = history.empty() ? std::numeric_limits<double>::infinity() : history.back();
    history.push_back(last.best_objective);

    if (angle < config.angle_tol) {
      converged = true;
      break;
    }
    if (std::isfinite(prev) && std::abs(prev - last.best_objective) <=
                                   config.relative_objective_tol * std::max(prev, std::numeric_limits<double>::min())) {
      converged = true;
      break;
    }
  }

  RigidSpdTransform transform{teacher_mean, centering_mean, student_mean, s, total, e};
  SpdCloud aligned = apply(transform, targets);
  const double final_objective = last.best_objective;

  FitReport report{
      .icp_iterations = iterations,
      .converged = converged,
      .objective_history = std::move(history),
      .rotation_updates = std::move(updates),
      .source_dispersion = c_s,
      .target_dispersion = c_t,
      .final_objective = final_objective,
      .correspondences = std::move(corr),
      .last_optimizer = std::move(last),
      .stages = FitStages{transported, src_rct, tgt_rct, tgt_scl, current, std::move(aligned)},
  };
  return {std::move(transform), std::move(report)};
}

}  // namespace spdicp
