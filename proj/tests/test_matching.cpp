#include "spdicp/matching.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <numeric>

using namespace spdicp;
using namespace spdicp::testing;

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 / 3.0 * std::numbers::pi));
}

TEST_CASE("features of a diagonal matrix") {
  const EllipsoidFeatures f = features_of(SpdMatrix::diagonal(Eigen::Vector3d(1, 2, 4)));
  CHECK(std::abs(f.v_min(0)) == doctest::Approx(1.0));
  CHECK(std::abs(f.v_max(2)) == doctest::Approx(1.0));
  CHECK(f.singularity_index == doctest::Approx(4.0));
  CHECK(f.volume == doctest::Approx(4.0 / 3.0 * std::numbers::pi * std::sqrt(8.0)));
  CHECK_FALSE(f.degenerate);
  CHECK(features_of(SpdMatrix::diagonal(Eigen::Vector3d(1, 1, 4))).degenerate);
}

TEST_CASE("pair weight by hand") {
  const EllipsoidFeatures a = features_of(SpdMatrix::diagonal(Eigen::Vector2d(1, 2)));
  const EllipsoidFeatures b = features_of(SpdMatrix::diagonal(Eigen::Vector2d(4, 1)));
  // Axes swap, so both dot products vanish; p = 2 and 4, volumes pi sqrt 2 and 2 pi.
  const double expected = std::exp(-2.0) + std::exp(-std::abs(std::numbers::pi * std::sqrt(2.0) - 2 * std::numbers::pi));
  CHECK(pair_weight(a, b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(pair_weight(a, a) == doctest::Approx(4.0));
  CHECK_THROWS_AS(pair_weight(a, features_of(SpdMatrix::identity(3))), std::invalid_argument);
}

TEST_CASE("weights lie in (0, 4] and are sign invariant") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    EllipsoidFeatures a = features_of(random_spd(3, rng)), b = features_of(random_spd(3, rng));
    const double w = pair_weight(a, b);
    CHECK(w > 0.0);
    CHECK(w <= 4.0 + 1e-12);
    a.v_min = -a.v_min;
    CHECK(pair_weight(a, b) == w);
  }
}

TEST_CASE("many-to-one matching is the brute-force argmax") {
  std::mt19937_64 rng(12);
  const SpdCloud t = random_cloud(15, 3, rng), s = random_cloud(20, 3, rng);
  for (int k : {1, 3}) {
    const CorrespondenceSet c = match(t, s, k);
    REQUIRE(c.pairs.size() == t.size());
    CHECK(c.exponent == k);
    for (std::size_t i = 0; i < t.size(); ++i) {
      double best = -1.0;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double w = pair_weight(features_of(t[i]), features_of(s[j]));
        if (w > best) best = w, arg = j;
      }
      CHECK(c.pairs[i] == std::pair{i, arg});
      CHECK(c.weights[i] == doctest::Approx(std::pow(best, k)));
    }
  }
}

TEST_CASE("ties go to the lowest source index") {
  const SpdMatrix a = SpdMatrix::diagonal(Eigen::Vector2d(1, 3));
  const SpdCloud s({SpdMatrix::diagonal(Eigen::Vector2d(5, 7)), a, a, a});
  const CorrespondenceSet c = match(SpdCloud({a}), s, 1);
  CHECK(c.pairs[0].second == 1);
}

TEST_CASE("one-to-one matching equals exhaustive search") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const SpdCloud t = random_cloud(7, 3, rng), s = random_cloud(8, 3, rng);
    const CorrespondenceSet c = match(t, s, 2, MatchMode::OneToOne);
    const auto ft = features_of(t), fs = features_of(s);
    double got = 0.0;
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < t.size(); ++i) {
      got += pair_weight(ft[i], fs[c.pairs[i].second]);
      used.push_back(c.pairs[i].second);
    }
    std::sort(used.begin(), used.end());
    CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());

    std::vector<std::size_t> perm(s.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double total = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) total += pair_weight(ft[i], fs[perm[i]]);
      best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("matching rejects bad input") {
  const SpdCloud a({SpdMatrix::identity(2), SpdMatrix::identity(2)});
  const SpdCloud b({SpdMatrix::identity(2)});
  CHECK_THROWS_AS(match(a, b, 0), std::invalid_argument);
  CHECK_THROWS_AS(match(a, b, 1, MatchMode::OneToOne), std::invalid_argument);
  CHECK_THROWS_AS(match(a, SpdCloud({SpdMatrix::identity(3)}), 1), std::invalid_argument);
  CHECK_THROWS_AS(match_features({}, features_of(b), 1), std::invalid_argument);
}
