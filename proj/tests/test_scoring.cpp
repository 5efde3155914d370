#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sigverify/scoring.hpp"

using namespace sigverify;

TEST(Tanh, Examples) {
  const double mid[] = {3.0};
  EXPECT_EQ(tanh_normalize(mid, 3.0, 2.0)[0], 0.5);
  const double big[] = {100.0};
  EXPECT_DOUBLE_EQ(tanh_normalize(big, 0.0, 1.0)[0], 0.5 * (std::tanh(1.0) + 1.0));
  EXPECT_NEAR(tanh_normalize(big, 0.0, 1.0)[0], 0.8808, 1e-4);
  const double huge[] = {1e9};
  EXPECT_DOUBLE_EQ(tanh_normalize(huge, 0.0, 1.0)[0], 1.0);
  EXPECT_THROW(tanh_normalize(mid, 0.0, 0.0), ValidationError);
  EXPECT_THROW(tanh_normalize(mid, 0.0, -1.0), ValidationError);
}

TEST(Tanh, StrictlyIncreasingOnSortedInput) {
  std::vector<double> s;
  for (int i = -50; i <= 50; ++i) s.push_back(i * 3.7);
  const auto out = tanh_normalize(s, 1.0, 2.0);
  for (std::size_t k = 1; k < out.size(); ++k) {
    EXPECT_LT(out[k - 1], out[k]);
    EXPECT_GT(out[k], 0.0);
    EXPECT_LT(out[k], 1.0);
  }
}

TEST(Tanh, EstimateParams) {
  const double g[] = {1.0, 3.0};
  const auto p = estimate_tanh_params(g);
  EXPECT_EQ(p.mu, 2.0);
  EXPECT_EQ(p.sigma, 1.0);
  const double one[] = {1.0};
  EXPECT_THROW(estimate_tanh_params(one), ValidationError);
  const double flat[] = {2.0, 2.0};
  EXPECT_THROW(estimate_tanh_params(flat), DegenerateInputError);
}

TEST(Fusion, Examples) {
  const double s1[] = {0.3, 0.9}, w1[] = {1, 0};
  EXPECT_EQ(fuse_weighted(s1, w1), 0.3);
  const double s2[] = {0.2, 0.8}, w2[] = {1, 1};
  EXPECT_DOUBLE_EQ(fuse_weighted(s2, w2), 0.5);
  const double s3[] = {0.9, 0.3}, w3[] = {2, 1};
  EXPECT_DOUBLE_EQ(fuse_weighted(s3, w3), 0.7);
  const double w0[] = {0, 0}, wneg[] = {1, -1}, wshort[] = {1};
  EXPECT_THROW(fuse_weighted(s1, w0), ValidationError);
  EXPECT_THROW(fuse_weighted(s1, wneg), ValidationError);
  EXPECT_THROW(fuse_weighted(s1, wshort), ValidationError);
}

TEST(Fusion, Monotone) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s{u(rng), u(rng), u(rng)}, w{u(rng), u(rng), u(rng)};
    const double base = fuse_weighted(s, w);
    s[trial % 3] += u(rng);
    EXPECT_GE(fuse_weighted(s, w), base);
  }
}

TEST(SigStatLocal, Examples) {
  EXPECT_EQ(sigstat_local_score(0.5, 0.5, 1.0, 2.0), 1.0);
  EXPECT_EQ(sigstat_local_score(2.0, 0.5, 1.0, 2.0), 0.0);
  EXPECT_EQ(sigstat_local_score(1.25, 0.5, 1.0, 2.0), 0.5);
  EXPECT_GT(sigstat_local_score(0.0, 0.5, 1.0, 2.0), 1.0);  // unclamped
  EXPECT_THROW(sigstat_local_score(1.0, 2.0, 1.0, 2.0), ValidationError);
}

TEST(SigStatGlobal, ExamplesAndClamp) {
  EXPECT_EQ(sigstat_global_score(1.0, 1.0, 3.0), 0.0);
  EXPECT_EQ(sigstat_global_score(3.0, 1.0, 3.0), 1.0);
  EXPECT_EQ(sigstat_global_score(2.0, 1.0, 3.0), 0.5);
  EXPECT_EQ(sigstat_global_score(0.2, 1.0, 3.0), 0.0);
  EXPECT_EQ(sigstat_global_score(7.0, 1.0, 3.0), 1.0);
  EXPECT_THROW(sigstat_global_score(1.0, 3.0, 3.0), ValidationError);
}

TEST(SigStatGlobal, NonDecreasingWithinUnitInterval) {
  double prev = -1.0;
  for (int i = 0; i <= 400; ++i) {
    const double v = sigstat_global_score(-1.0 + i * 0.02, 1.0, 4.0);
    EXPECT_GE(v, prev);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    prev = v;
  }
}

TEST(SigStatThresholds, Quantiles) {
  std::vector<double> g{1, 2, 3, 4, 5}, f{10, 20, 30};
  EXPECT_EQ(quantile(g, 0.0), 1.0);
  EXPECT_EQ(quantile(g, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile(g, 0.05), 1.2);
  const auto t = estimate_sigstat_thresholds(g, f);
  EXPECT_DOUBLE_EQ(t.g_th, 1.2);
  EXPECT_EQ(t.f_th, 20.0);
  EXPECT_EQ(t.d_g_min, 1.0);
  EXPECT_EQ(t.d_f_med, 20.0);
  EXPECT_THROW(quantile({}, 0.5), ValidationError);
}

TEST(Orientation, ToSimilarity) {
  const double d[] = {1, 3};
  EXPECT_EQ(to_similarity(d, ScoreOrientation::lower_is_genuine), (std::vector<double>{-1, -3}));
  EXPECT_EQ(to_similarity(d, ScoreOrientation::higher_is_genuine), (std::vector<double>{1, 3}));
}

TEST(Orientation, EerInvariantUnderConversion) {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> gen(1.0, 0.5), imp(2.0, 0.5);
  std::vector<double> dist;
  std::vector<Label> labels;
  for (int i = 0; i < 30; ++i) {
    dist.push_back(gen(rng));
    labels.push_back(Label::genuine);
    dist.push_back(imp(rng));
    labels.push_back(Label::skilled_forgery);
  }
  const auto sim = to_similarity(dist, ScoreOrientation::lower_is_genuine);
  std::vector<ScoreRecord> as_sim, flipped;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    as_sim.push_back({sim[k], labels[k]});
    // distance stream evaluated with the roles of the classes swapped
    flipped.push_back({dist[k], labels[k] == Label::genuine ? Label::skilled_forgery : Label::genuine});
  }
  EXPECT_NEAR(eer(as_sim), oracle::midpoint_eer(as_sim), 0.0);
  EXPECT_DOUBLE_EQ(eer(as_sim), eer(flipped));
}

TEST(FusionSearch, FindsInformativeStream) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> good, junk;
  std::vector<Label> labels;
  for (int i = 0; i < 40; ++i) {
    const bool genuine = i % 2 == 0;
    labels.push_back(genuine ? Label::genuine : Label::random_forgery);
    good.push_back((genuine ? 3.0 : 0.0) + 0.1 * noise(rng));
    junk.push_back(10.0 * noise(rng));
  }
  const auto w = search_fusion_weights({junk, good}, labels);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_NEAR(w[0] + w[1], 1.0, 1e-12);
  EXPECT_GT(w[1], w[0]);
  std::vector<ScoreRecord> fused;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const double s[] = {junk[k], good[k]};
    fused.push_back({fuse_weighted(s, w), labels[k]});
  }
  EXPECT_EQ(eer(fused), 0.0);
}
