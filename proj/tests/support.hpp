#pragma once

#include "spdicp/spd.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <vector>

namespace spdicp::testing {

inline Eigen::MatrixXd random_symmetric(Eigen::Index d, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, sigma);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) g(i, j) = g(j, i) = n(rng);
  return g;
}

// exp of a random symmetric matrix, via an eigendecomposition independent of the library.
inline SpdMatrix random_spd(Eigen::Index d, std::mt19937_64& rng, double sigma = 0.7) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(random_symmetric(d, rng, sigma));
  const Eigen::MatrixXd m =
      es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
  return SpdMatrix(0.5 * (m + m.transpose()));
}

inline SpdCloud random_cloud(std::size_t n, Eigen::Index d, std::mt19937_64& rng, double sigma = 0.7) {
  std::vector<SpdMatrix> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(random_spd(d, rng, sigma));
  return SpdCloud(std::move(pts));
}

inline Eigen::MatrixXd random_matrix(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = n(rng);
  return a;
}

// Affine-invariant distance from the generalized eigenproblem B v = lambda A v.
inline double oracle_dist(const SpdMatrix& a, const SpdMatrix& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(b.matrix(), a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().matrix().norm();
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace spdicp::testing
