#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sigverify/alignment.hpp"

using namespace sigverify;

namespace {

void expect_valid_path(const WarpingPath& p, std::size_t n, std::size_t m) {
  ASSERT_FALSE(p.pairs.empty());
  EXPECT_EQ(p.pairs.front(), std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(p.pairs.back(), std::make_pair(n - 1, m - 1));
  for (std::size_t k = 1; k < p.pairs.size(); ++k) {
    const auto di = p.pairs[k].first - p.pairs[k - 1].first;
    const auto dj = p.pairs[k].second - p.pairs[k - 1].second;
    EXPECT_LE(di, 1u);
    EXPECT_LE(dj, 1u);
    EXPECT_GE(di + dj, 1u);
  }
}

}  // namespace

TEST(Dtw, Examples) {
  const Matrix a{{0}, {0}}, b{{1}, {1}};
  const auto r = dtw(a, b);
  EXPECT_EQ(r.cumulative_cost, 2.0);
  EXPECT_EQ(r.path.size(), 2u);
  EXPECT_EQ(r.normalized_score, 1.0);

  const auto r2 = dtw(Matrix{{0}, {1}}, Matrix{{0}, {2}});
  EXPECT_EQ(r2.cumulative_cost, 1.0);
  EXPECT_EQ(r2.path.size(), 2u);
  EXPECT_EQ(r2.normalized_score, 0.5);

  const Matrix s{{1, 2}, {3, 4}, {5, 6}};
  const auto self = dtw(s, s);
  EXPECT_EQ(self.cumulative_cost, 0.0);
  EXPECT_EQ(self.normalized_score, 0.0);
}

TEST(Dtw, MatchesBruteForceAndIsSymmetric) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 1 + trial % 6, m = 1 + (trial / 6) % 6, c = 1 + trial % 3;
    const auto a = oracle::random_matrix(rng, n, c), b = oracle::random_matrix(rng, m, c);
    for (auto metric : {LocalMetric::euclidean, LocalMetric::sq_euclidean}) {
      const auto r = dtw(a, b, metric);
      EXPECT_NEAR(r.cumulative_cost, oracle::brute_force_dtw(a, b, metric), 1e-12);
      EXPECT_NEAR(dtw(b, a, metric).cumulative_cost, r.cumulative_cost, 1e-12);
      expect_valid_path(r.path, n, m);
      EXPECT_DOUBLE_EQ(r.normalized_score, r.cumulative_cost / r.path.size());
      double along = 0.0;
      for (auto [i, j] : r.path.pairs) along += oracle::pair_cost(a, b, i, j, metric);
      EXPECT_NEAR(along, r.cumulative_cost, 1e-12);
    }
  }
}

TEST(Dtw, TiesPreferDiagonal) {
  // all local costs are zero, so every path ties
  const Matrix z(3, 1, 0.0);
  const auto r = dtw(z, z);
  EXPECT_EQ(r.path.size(), 3u);
}

TEST(Dtw, ChannelMismatch) {
  TimeFunctionMatrix a({{"x", {0, 1}}}, 1.0), b({{"y", {0, 1}}}, 1.0);
  EXPECT_THROW(dtw(a, b), ValidationError);
  EXPECT_THROW(dtw(Matrix(2, 1), Matrix(2, 2)), ValidationError);
  EXPECT_THROW(dtw(Matrix(), Matrix(2, 1)), ValidationError);
}

TEST(SoftDtw, SingleSample) {
  const Matrix a{{1, 2}}, b{{3, 5}};
  for (double g : {0.01, 1.0, 10.0}) EXPECT_DOUBLE_EQ(soft_dtw(a, b, g), 13.0);
  EXPECT_THROW(soft_dtw(a, b, 0.0), ValidationError);
}

TEST(SoftDtw, HardLimitAndMonotoneInGamma) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_matrix(rng, 10, 2), b = oracle::random_matrix(rng, 12, 2);
    const double hard = dtw(a, b, LocalMetric::sq_euclidean).cumulative_cost;
    EXPECT_LT(std::abs(soft_dtw(a, b, 1e-3) - hard) / std::max(1.0, hard), 1e-3);
    double prev = -INFINITY;
    for (double g : {1.0, 0.1, 0.01, 0.001}) {
      const double v = soft_dtw(a, b, g);
      EXPECT_LE(v, hard + 1e-12);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(SoftDtw, IdenticalSequencesBound) {
  std::mt19937_64 rng(43);
  const auto a = oracle::random_matrix(rng, 7, 3);
  const double v = soft_dtw(a, a, 1.0);
  EXPECT_LE(v, 0.0);
  EXPECT_GE(v, -std::log(3.0) * 14.0);
}

TEST(SoftDtwGrad, SingleSampleQuadratic) {
  const Matrix a{{1, -2}}, b{{4, 1}};
  const auto g = soft_dtw_grad(a, b, 0.5);
  EXPECT_DOUBLE_EQ(g(0, 0), 2.0 * (1 - 4));
  EXPECT_DOUBLE_EQ(g(0, 1), 2.0 * (-2 - 1));
}

TEST(SoftDtwGrad, MatchesFiniteDifferences) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = oracle::random_matrix(rng, 8, 2), b = oracle::random_matrix(rng, 10, 2);
    for (auto metric : {LocalMetric::sq_euclidean, LocalMetric::euclidean}) {
      const auto g = soft_dtw_value_and_grad(a, b, 0.1, metric);
      EXPECT_DOUBLE_EQ(g.value, soft_dtw(a, b, 0.1, metric));
      const auto fa = oracle::finite_difference(
          [&](const Matrix& x) { return soft_dtw(x, b, 0.1, metric); }, a);
      const auto fb = oracle::finite_difference(
          [&](const Matrix& x) { return soft_dtw(a, x, 0.1, metric); }, b);
      EXPECT_LT(oracle::relative_error(g.grad_a, fa), 1e-4);
      EXPECT_LT(oracle::relative_error(g.grad_b, fb), 1e-4);
    }
  }
}

TEST(SoftDtwGrad, RoleSwap) {
  std::mt19937_64 rng(45);
  const auto a = oracle::random_matrix(rng, 6, 2), b = oracle::random_matrix(rng, 9, 2);
  const auto ab = soft_dtw_value_and_grad(a, b, 0.3);
  const auto ba = soft_dtw_value_and_grad(b, a, 0.3);
  EXPECT_NEAR(ab.value, ba.value, 1e-12);
  for (std::size_t k = 0; k < ab.grad_a.data().size(); ++k) {
    EXPECT_NEAR(ab.grad_a.data()[k], ba.grad_b.data()[k], 1e-10);
  }
  // a = b: both gradients agree, and a common translation of every row
  // leaves the value unchanged
  const auto same = soft_dtw_value_and_grad(a, a, 0.3);
  for (std::size_t k = 0; k < same.grad_a.data().size(); ++k) {
    EXPECT_NEAR(same.grad_a.data()[k], same.grad_b.data()[k], 1e-10);
  }
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) total += ab.grad_a(i, c);
    for (std::size_t j = 0; j < b.rows(); ++j) total += ab.grad_b(j, c);
    EXPECT_NEAR(total, 0.0, 1e-10);
  }
}

TEST(TripletLoss, InactiveHingeAndCancellation) {
  std::mt19937_64 rng(46);
  const auto a = oracle::random_matrix(rng, 6, 2);
  const auto far = oracle::random_matrix(rng, 6, 2, 50.0, 60.0);
  const auto r = triplet_loss(a, a, far, 0.0, 0.1);
  EXPECT_EQ(r.loss, 0.0);
  for (const auto* g : {&r.grad_anchor, &r.grad_positive, &r.grad_negative}) {
    for (double v : g->data()) EXPECT_EQ(v, 0.0);
  }
  const auto p = oracle::random_matrix(rng, 7, 2);
  EXPECT_NEAR(triplet_loss(a, p, p, 0.7, 0.1).loss, 0.7, 1e-12);
  EXPECT_THROW(triplet_loss(a, p, p, -1.0, 0.1), ValidationError);
}

TEST(TripletLoss, MatchesFiniteDifferences) {
  std::mt19937_64 rng(47);
  for (auto norm : {SoftDtwNormalization::none, SoftDtwNormalization::length_sum}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = oracle::random_matrix(rng, 6, 2), p = oracle::random_matrix(rng, 7, 2),
                 n = oracle::random_matrix(rng, 5, 2);
      const double margin = 50.0, gamma = 0.1;
      const auto r = triplet_loss(a, p, n, margin, gamma, norm);
      ASSERT_GT(r.loss, 0.0);
      auto loss = [&](const Matrix& x, const Matrix& y, const Matrix& z) {
        return triplet_loss(x, y, z, margin, gamma, norm).loss;
      };
      EXPECT_LT(oracle::relative_error(
                    r.grad_anchor,
                    oracle::finite_difference([&](const Matrix& x) { return loss(x, p, n); }, a)),
                1e-4);
      EXPECT_LT(oracle::relative_error(
                    r.grad_positive,
                    oracle::finite_difference([&](const Matrix& x) { return loss(a, x, n); }, p)),
                1e-4);
      EXPECT_LT(oracle::relative_error(
                    r.grad_negative,
                    oracle::finite_difference([&](const Matrix& x) { return loss(a, p, x); }, n)),
                1e-4);
    }
  }
}

TEST(PreAlign, IdentityAndBounds) {
  std::mt19937_64 rng(48);
  const auto a = oracle::random_matrix(rng, 4, 2);
  const auto [x, y] = pre_align(a, a);
  EXPECT_EQ(x, a);
  EXPECT_EQ(y, a);

  const auto s = oracle::random_matrix(rng, 3, 2), t = oracle::random_matrix(rng, 5, 2);
  const auto [u, v] = pre_align(s, t);
  EXPECT_EQ(u.rows(), v.rows());
  EXPECT_GE(u.rows(), 5u);
  EXPECT_LE(u.rows(), 7u);
}

TEST(PreAlign, DiagonalCostEqualsDtwCost) {
  std::mt19937_64 rng(49);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_matrix(rng, 3 + trial % 5, 2);
    const auto b = oracle::random_matrix(rng, 2 + trial % 7, 2);
    const auto [u, v] = pre_align(a, b);
    double diag = 0.0;
    for (std::size_t k = 0; k < u.rows(); ++k) {
      diag += local_distance(u.row(k), v.row(k), LocalMetric::euclidean);
      // rows are copies of original rows, never interpolated
      bool found_u = false, found_v = false;
      for (std::size_t i = 0; i < a.rows(); ++i) found_u |= std::equal(u.row(k).begin(), u.row(k).end(), a.row(i).begin());
      for (std::size_t j = 0; j < b.rows(); ++j) found_v |= std::equal(v.row(k).begin(), v.row(k).end(), b.row(j).begin());
      EXPECT_TRUE(found_u && found_v);
    }
    EXPECT_NEAR(diag, dtw(a, b).cumulative_cost, 1e-12);
  }
}

TEST(PreAlign, TimeFunctionOverloadKeepsNames) {
  TimeFunctionMatrix a({{"x", {0, 1, 2}}, {"y", {0, 0, 1}}}, 10.0);
  TimeFunctionMatrix b({{"x", {0, 2}}, {"y", {0, 1}}}, 10.0);
  const auto [u, v] = pre_align(a, b);
  EXPECT_EQ(u.names(), a.names());
  EXPECT_EQ(u.length(), v.length());
}
