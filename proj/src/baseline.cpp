#include "spdicp/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace spdicp {

namespace {

// Slack on pruning bounds so round-off in the spectral bound never discards
// a point the full scan would pick.
double prune_threshold(double best) { return best + 1e-9 * (1.0 + best); }

bool better(double d, std::size_t i, double best_d, std::size_t best_i) {
  return d < best_d || (d == best_d && i < best_i);
}

}  // namespace

Eigen::VectorXd log_spectrum(const SpdMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log();
}

NnIndex::NnIndex(const SpdCloud& points, double voxel_size) : points_(points), voxel_size_(voxel_size) {
  if (!(voxel_size > 0.0)) throw std::invalid_argument("NnIndex: voxel size must be positive");
  spectra_.reserve(points_.size());
  keys_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    Eigen::VectorXd spec = log_spectrum(points_[i]);
    std::vector<int> key(spec.size());
    for (Eigen::Index k = 0; k < spec.size(); ++k) key[k] = static_cast<int>(std::floor(spec(k) / voxel_size_));
    voxels_[key].push_back(i);
    spectra_.push_back(std::move(spec));
    keys_.push_back(std::move(key));
  }
}

NnIndex::Hit NnIndex::nearest_brute_force(const SpdMatrix& query) const {
  if (query.dim() != points_.dim()) throw std::invalid_argument("NnIndex: dimension mismatch");
  Hit best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = dist(query, points_[i]);
    if (better(d, i, best.distance, best.index)) best = {i, d};
  }
  last_evaluations_ = points_.size();
  return best;
}

NnIndex::Hit NnIndex::nearest(const SpdMatrix& query) const {
  if (query.dim() != points_.dim()) throw std::invalid_argument("NnIndex: dimension mismatch");
  const Eigen::VectorXd q = log_spectrum(query);

  // Lower bound from the query spectrum to every point of a voxel box.
  std::vector<std::pair<double, const std::vector<std::size_t>*>> order;
  order.reserve(voxels_.size());
  for (const auto& [key, members] : voxels_) {
    double sq = 0.0;
    for (std::size_t k = 0; k < key.size(); ++k) {
      const double lo = key[k] * voxel_size_;
      const double hi = lo + voxel_size_;
      const double gap = q(k) < lo ? lo - q(k) : (q(k) > hi ? q(k) - hi : 0.0);
      sq += gap * gap;
    }
    order.emplace_back(std::sqrt(sq), &members);
  }
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  Hit best{0, std::numeric_limits<double>::infinity()};
  std::size_t evaluations = 0;
  for (const auto& [bound, members] : order) {
    if (bound > prune_threshold(best.distance)) break;
    for (std::size_t i : *members) {
      if ((spectra_[i] - q).norm() > prune_threshold(best.distance)) continue;
      const double d = dist(query, points_[i]);
      ++evaluations;
      if (better(d, i, best.distance, best.index)) best = {i, d};
    }
  }
  last_evaluations_ = evaluations;
  return best;
}

NnTransferMap build_nn_map(const SpdCloud& teacher_samples, const SpdCloud& student_samples) {
  if (teacher_samples.dim() != student_samples.dim()) throw std::invalid_argument("build_nn_map: dimension mismatch");
  NnTransferMap map{teacher_samples, student_samples, {}, 0.5};
  const NnIndex student_index(student_samples, map.voxel_size);
  map.pair_index.reserve(teacher_samples.size());
  for (const auto& t : teacher_samples) map.pair_index.push_back(student_index.nearest(t).index);
  return map;
}

NnTransferMap build_nn_map(const SerialManipulator& teacher, const SerialManipulator& student, std::size_t n,
                           std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("build_nn_map: n must be >= 1");
  return build_nn_map(sample_random_dataset(teacher, n, seed), sample_random_dataset(student, n, seed));
}

BaselineTransfer::BaselineTransfer(NnTransferMap map)
    : map_(std::move(map)), teacher_index_(map_.teacher_samples, map_.voxel_size) {
  if (map_.pair_index.size() != map_.teacher_samples.size())
    throw std::invalid_argument("BaselineTransfer: pair_index length differs from teacher sample count");
  for (std::size_t j : map_.pair_index)
    if (j >= map_.student_samples.size()) throw std::invalid_argument("BaselineTransfer: pair index out of range");
}

SpdCloud BaselineTransfer::transfer(const SpdCloud& new_points) const {
  if (new_points.dim() != map_.teacher_samples.dim()) throw std::invalid_argument("baseline_transfer: dimension mismatch");
  std::vector<SpdMatrix> out;
  out.reserve(new_points.size());
  for (const auto& p : new_points) out.push_back(map_.student_samples[map_.pair_index[teacher_index_.nearest(p).index]]);
  return SpdCloud(std::move(out), new_points.labels());
}

SpdCloud baseline_transfer(const NnTransferMap& map, const SpdCloud& new_points) {
  return BaselineTransfer(map).transfer(new_points);
}

namespace {

EvalReport rmse_core(const SpdCloud& predicted, const SpdCloud& reference) {
  if (predicted.size() != reference.size()) throw std::invalid_argument("rmse: clouds differ in size");
  if (predicted.dim() != reference.dim()) throw std::invalid_argument("rmse: dimension mismatch");
  EvalReport report;
  report.per_point_distances.reserve(predicted.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = dist(predicted[i], reference[i]);
    report.per_point_distances.push_back(d);
    sq += d * d;
  }
  const double c = dispersion(predicted, geometric_mean(predicted));
  if (!(c > 0.0))
    throw std::domain_error("rmse: degenerate normalization, predicted cloud has zero dispersion about its mean");
  report.dispersion_after = c;
  report.rmse = std::sqrt(sq / static_cast<double>(predicted.size())) / c;
  return report;
}

}  // namespace

EvalReport rmse(const SpdCloud& predicted, const SpdCloud& reference) { return rmse_core(predicted, reference); }

EvalReport rmse(const SpdCloud& predicted, const SpdCloud& reference, const SpdCloud& baseline_cloud) {
  EvalReport report = rmse_core(predicted, reference);
  const double cb = dispersion(baseline_cloud, geometric_mean(baseline_cloud));
  report.baseline_dispersion = cb;
  if (cb > 0.0) report.rmse_baseline_normalized = report.rmse * report.dispersion_after / cb;
  return report;
}

}  // namespace spdicp
