#include "spdicp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace spdicp {

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

// Disjoint sample streams for training and held-out joint draws.
constexpr std::uint64_t kHeldoutOffset = 1'000'003;

std::vector<Eigen::VectorXd> line(const Eigen::VectorXd& from, const Eigen::VectorXd& to, int steps) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
    out.push_back(from + t * (to - from));
  }
  return out;
}

SpdCloud trajectory_cloud(const SerialManipulator& m, const std::vector<JointTrajectory>& trajectories) {
  return trajectory_dataset(m, Scripted{trajectories}).cloud;
}

}  // namespace

PlantedTransform random_planted_transform(const SpdMatrix& source_mean, std::mt19937_64& rng) {
  const Eigen::Index d = source_mean.dim();
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  std::normal_distribution<double> normal(0.0, 0.5);
  Rotation r = Rotation::random(d, rng);
  const double exponent = unit(rng);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) g(i, j) = g(j, i) = normal(rng);
  return {source_mean, std::move(r), exponent, expm(g)};
}

SpdCloud apply_planted(const PlantedTransform& t, const SpdCloud& sources) {
  const Eigen::MatrixXd w = inv_sqrtm(t.source_mean).matrix();
  const Eigen::MatrixXd a = sqrtm(t.translation).matrix() * t.rotation.matrix();
  return sources.map([&](const SpdMatrix& s) { return congruence(a, powm(congruence(w, s), t.exponent)); });
}

std::vector<std::size_t> most_singular(const SpdCloud& cloud, std::size_t k) {
  if (k == 0 || k > cloud.size()) throw std::invalid_argument("most_singular: k out of range");
  const auto features = features_of(cloud);
  std::vector<std::size_t> idx(cloud.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return features[a].singularity_index > features[b].singularity_index;
  });
  idx.resize(k);
  return idx;
}

ToyOutcome run_toy(const ToyConfig& config) {
  if (config.samples == 0 || config.heldout == 0) throw std::invalid_argument("toy: sample counts must be positive");
  const SerialManipulator& model = builtin_model(config.model);
  const SpdCloud sources = sample_random_dataset(model, config.samples, config.seed);
  const SpdCloud heldout_sources = sample_random_dataset(model, config.heldout, config.seed + kHeldoutOffset);

  std::mt19937_64 rng = seeded(config.seed, 1);
  const PlantedTransform truth = random_planted_transform(geometric_mean(sources), rng);
  const SpdCloud targets = apply_planted(truth, sources);
  const SpdCloud heldout_targets = apply_planted(truth, heldout_sources);

  FitConfig fc = config.fit;
  fc.seed = config.seed;
  FitResult result = [&] {
    if (config.singular_subset == 0) return fit(sources, targets, fc);
    // The subset is chosen on the student side and the same samples are kept on
    // the teacher side; the fit still has to discover the pairing itself.
    const auto keep = most_singular(sources, config.singular_subset);
    return fit(sources.subset(keep), targets.subset(keep), fc);
  }();

  const SpdCloud predicted = apply(result.transform, heldout_targets);
  return {rmse(predicted, heldout_sources).rmse, result.report.icp_iterations, result.report.converged,
          result.transform.scale_exponent, truth.exponent};
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::PtOnly: return "pt-only";
    case Variant::Icp: return "icp";
    case Variant::PtIcp: return "pt+icp";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "pt-only") return Variant::PtOnly;
  if (name == "icp") return Variant::Icp;
  if (name == "pt+icp" || name == "pt") return Variant::PtIcp;
  throw std::invalid_argument("unknown variant '" + name + "' (expected pt-only, icp or pt+icp)");
}

std::vector<JointTrajectory> planar_eval_trajectories() {
  constexpr double pi = std::numbers::pi;
  constexpr int steps = 20;
  auto v = [](double a, double b) { return Eigen::Vector2d(a, b).eval(); };
  return {
      {"M-Eval-1", line(v(-pi / 2, pi / 3), v(pi / 2, pi / 3), steps)},
      {"M-Eval-2", line(v(pi / 4, 0.2), v(pi / 4, pi - 0.2), steps)},
      {"M-Eval-3", line(v(-pi / 3, 0.3), v(2 * pi / 3, 2.5), steps)},
  };
}

TwoDofOutcome run_two_dof(const TwoDofConfig& config) {
  const SerialManipulator& teacher = builtin_model("planar2_horizontal");
  const SerialManipulator& student = builtin_model("planar2_vertical");
  const SpdCloud teacher_all = trajectory_dataset(teacher, config.sweep).cloud;
  const SpdCloud student_all = trajectory_dataset(student, config.sweep).cloud;
  if (config.train_samples == 0 || config.train_samples > teacher_all.size())
    throw std::invalid_argument("two_dof: train_samples out of range");
  const std::size_t stride = teacher_all.size() / config.train_samples;
  const std::size_t offset = static_cast<std::size_t>(config.seed % stride);
  // Sweep data keeps the same joint configurations in both domains (the matcher
  // never sees that pairing); random data draws each domain independently.
  const SpdCloud teacher_train = config.random_training
                                     ? sample_random_dataset(teacher, config.train_samples, config.seed)
                                     : subsample(teacher_all, stride, offset);
  const SpdCloud student_train =
      config.random_training ? sample_random_dataset(student, config.train_samples, config.seed + kHeldoutOffset)
                             : subsample(student_all, stride, offset);

  RigidSpdTransform transform = RigidSpdTransform::identity(3);
  int iterations = 0;
  if (config.variant == Variant::PtOnly) {
    transform = fit_pt_only(student_train, teacher_train, {});
  } else {
    FitConfig fc;
    fc.use_pt = config.variant == Variant::PtIcp;
    fc.weight_exponent = config.weight_exponent;
    fc.icp_max_iter = config.icp_max_iter;
    fc.rotation = config.rotation;
    fc.seed = config.seed;
    FitResult r = fit(student_train, teacher_train, fc);
    transform = std::move(r.transform);
    iterations = r.report.icp_iterations;
  }

  TwoDofOutcome out;
  out.iterations = iterations;
  out.train_samples = teacher_train.size();
  const auto evals = planar_eval_trajectories();
  for (std::size_t k = 0; k < evals.size(); ++k) {
    const SpdCloud t = trajectory_cloud(teacher, {evals[k]});
    const SpdCloud s = trajectory_cloud(student, {evals[k]});
    out.rmse[k] = rmse(apply(transform, t), s).rmse;
  }
  return out;
}

std::vector<JointTrajectory> seven_dof_eval_trajectories(const SerialManipulator& m) {
  if (m.joints() != 7) throw std::invalid_argument("seven_dof_eval_trajectories: model must have 7 joints");
  Eigen::VectorXd lo(7), hi(7), mid(7);
  for (std::size_t i = 0; i < 7; ++i) {
    const auto& l = m.limits()[i];
    const double span = l.hi - l.lo;
    lo(static_cast<Eigen::Index>(i)) = l.lo + 0.1 * span;
    hi(static_cast<Eigen::Index>(i)) = l.hi - 0.1 * span;
    mid(static_cast<Eigen::Index>(i)) = 0.5 * (l.lo + l.hi);
  }
  auto moving = [&](std::initializer_list<Eigen::Index> joints) {
    Eigen::VectorXd a = mid, b = mid;
    for (Eigen::Index j : joints) {
      a(j) = lo(j);
      b(j) = hi(j);
    }
    return line(a, b, 20);
  };
  return {
      {"raise_forward", moving({1})},
      {"raise_sideways", moving({0, 1})},
      {"bend_elbow", moving({3})},
      {"rotate_shoulder", moving({2})},
  };
}

SevenDofOutcome run_seven_dof(const SevenDofConfig& config, const BaselineTransfer& baseline) {
  const SerialManipulator& teacher = builtin_model(config.teacher);
  const SerialManipulator& student = builtin_model(config.student);
  const SpdCloud teacher_train = sample_random_dataset(teacher, config.train_samples, config.seed);
  const SpdCloud student_train = sample_random_dataset(student, config.train_samples, config.seed + kHeldoutOffset);

  FitConfig fc = config.fit;
  fc.seed = config.seed;
  const FitResult r = fit(student_train, teacher_train, fc);

  SevenDofOutcome out;
  out.iterations = r.report.icp_iterations;
  for (const auto& traj : seven_dof_eval_trajectories(teacher)) {
    const SpdCloud eval = trajectory_cloud(teacher, {traj});
    const SpdCloud reference = baseline.transfer(eval);
    out.rmse_transferred.push_back(rmse(apply(r.transform, eval), reference).rmse);
    out.rmse_untransferred.push_back(rmse(eval, reference).rmse);
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace spdicp
