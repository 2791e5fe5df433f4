#include "spdicp/matching.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spdicp {

namespace {

// Maximum-weight assignment of every row to a distinct column (rows <= cols).
// Shortest augmenting path formulation of the Hungarian method on costs -w.
std::vector<std::size_t> assign_max_weight(const std::vector<std::vector<double>>& w) {
  const std::size_t n = w.size();
  const std::size_t m = w.front().size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = -w[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

double unit_ball_volume(Eigen::Index dim) {
  const double half = 0.5 * static_cast<double>(dim);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

EllipsoidFeatures features_of(const SpdMatrix& m) {
  const SymEig eig = sym_eig(m.matrix());
  const Eigen::Index d = eig.values.size();
  EllipsoidFeatures f;
  f.v_min = eig.vectors.col(0).normalized();
  f.v_max = eig.vectors.col(d - 1).normalized();
  f.singularity_index = eig.values(d - 1) / eig.values(0);
  f.volume = unit_ball_volume(d) * eig.values.cwiseSqrt().prod();
  if (d > 1) {
    f.degenerate = std::abs(eig.values(1) - eig.values(0)) < 1e-8 ||
                   std::abs(eig.values(d - 1) - eig.values(d - 2)) < 1e-8;
  }
  return f;
}

std::vector<EllipsoidFeatures> features_of(const SpdCloud& cloud) {
  std::vector<EllipsoidFeatures> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(features_of(p));
  return out;
}

double pair_weight(const EllipsoidFeatures& t, const EllipsoidFeatures& s) {
  if (t.v_min.size() != s.v_min.size()) throw std::invalid_argument("pair_weight: dimension mismatch");
  return std::abs(t.v_min.dot(s.v_min)) + std::abs(t.v_max.dot(s.v_max)) +
         std::exp(-std::abs(t.singularity_index - s.singularity_index)) +
         std::exp(-std::abs(t.volume - s.volume));
}

CorrespondenceSet match_features(const std::vector<EllipsoidFeatures>& targets,
                                 const std::vector<EllipsoidFeatures>& sources, int exponent,
                                 MatchMode mode) {
  if (targets.empty() || sources.empty()) throw std::invalid_argument("match: clouds must be non-empty");
  if (exponent < 1) throw std::invalid_argument("match: exponent must be a positive integer");

  std::vector<std::vector<double>> w(targets.size(), std::vector<double>(sources.size()));
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = 0; j < sources.size(); ++j) w[i][j] = pair_weight(targets[i], sources[j]);

  std::vector<std::size_t> chosen(targets.size(), 0);
  if (mode == MatchMode::ManyToOne) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < sources.size(); ++j)
        if (w[i][j] > w[i][best]) best = j;
      chosen[i] = best;
    }
  } else {
    if (targets.size() > sources.size())
      throw std::invalid_argument("match: one-to-one mode needs at least as many sources as targets");
    chosen = assign_max_weight(w);
  }

  CorrespondenceSet out;
  out.exponent = exponent;
  out.pairs.reserve(targets.size());
  out.weights.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    out.pairs.emplace_back(i, chosen[i]);
    out.weights.push_back(std::pow(w[i][chosen[i]], exponent));
  }
  return out;
}

CorrespondenceSet match(const SpdCloud& targets, const SpdCloud& sources, int exponent, MatchMode mode) {
  if (targets.dim() != sources.dim()) throw std::invalid_argument("match: dimension mismatch");
  return match_features(features_of(targets), features_of(sources), exponent, mode);
}

}  // namespace spdicp
