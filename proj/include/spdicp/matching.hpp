#pragma once

// Correspondence heuristic between two SPD clouds based on ellipsoid geometry:
// alignment of the major and minor axes, singularity index, and volume.

#include "spdicp/spd.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace spdicp {

struct EllipsoidFeatures {
  Eigen::VectorXd v_min;  // unit eigenvector of the smallest eigenvalue
  Eigen::VectorXd v_max;  // unit eigenvector of the largest eigenvalue
  double singularity_index = 1.0;  // lambda_max / lambda_min
  double volume = 0.0;             // unit-ball volume * prod sqrt(lambda_i)
  bool degenerate = false;         // an extreme eigenvalue is repeated (gap < 1e-8)
};

/// Volume of the unit ball in R^dim.
double unit_ball_volume(Eigen::Index dim);

EllipsoidFeatures features_of(const SpdMatrix& m);

/// |v_min.v_min'| + |v_max.v_max'| + exp(-|p - p'|) + exp(-|vol - vol'|), in (0, 4].
double pair_weight(const EllipsoidFeatures& t, const EllipsoidFeatures& s);

struct CorrespondenceSet {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (target, source)
  std::vector<double> weights;                             // raw weight ^ exponent
  int exponent = 1;
};

enum class MatchMode {
  ManyToOne,  // per-target argmax, ties to the lowest source index
  OneToOne,   // maximum-weight assignment; requires |targets| <= |sources|
};

CorrespondenceSet match(const SpdCloud& targets, const SpdCloud& sources, int exponent,
                        MatchMode mode = MatchMode::ManyToOne);

/// Same as match() with features already extracted.
CorrespondenceSet match_features(const std::vector<EllipsoidFeatures>& targets,
                                 const std::vector<EllipsoidFeatures>& sources, int exponent,
                                 MatchMode mode = MatchMode::ManyToOne);

std::vector<EllipsoidFeatures> features_of(const SpdCloud& cloud);

}  // namespace spdicp
