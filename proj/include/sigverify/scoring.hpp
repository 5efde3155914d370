#pragma once

#include <span>
#include <vector>

#include "sigverify/eval.hpp"

namespace sigverify {

enum class ScoreOrientation { higher_is_genuine, lower_is_genuine };

// Slope of the tanh-estimator mapping.
inline constexpr double kTanhSlope = 0.01;

// s' = 0.5 * (tanh(0.01 * (s - mu) / sigma) + 1)
std::vector<double> tanh_normalize(std::span<const double> scores, double mu, double sigma);

struct TanhParams {
  double mu = 0.0;
  double sigma = 1.0;
};

// Mean and population standard deviation of development genuine scores.
TanhParams estimate_tanh_params(std::span<const double> genuine_scores);

// sum(w_i * s_i) / sum(w_i)
double fuse_weighted(std::span<const double> scores, std::span<const double> weights);

// P = (s * f_th - d) / (s * f_th - g_th), unclamped.
double sigstat_local_score(double d, double g_th, double f_th, double s);

// P = 1 - (d_f_med - d) / (d_f_med - d_g_min), clamped to [0, 1].
double sigstat_global_score(double d, double d_g_min, double d_f_med);

struct SigStatThresholds {
  double g_th = 0.0;     // 5th percentile of genuine distances
  double f_th = 0.0;     // 50th percentile of forgery distances
  double d_g_min = 0.0;  // minimum genuine distance
  double d_f_med = 0.0;  // median forgery distance
};

SigStatThresholds estimate_sigstat_thresholds(std::span<const double> genuine_distances,
                                              std::span<const double> forgery_distances);

// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);

// lower_is_genuine streams are negated; higher_is_genuine passes through.
std::vector<double> to_similarity(std::span<const double> scores, ScoreOrientation orientation);

/// Grid search over the weight simplex (step `step`) for fusing K
/// higher-is-genuine score streams, minimising the overall EER against
/// `labels`. Ties keep the first candidate in enumeration order.
std::vector<double> search_fusion_weights(const std::vector<std::vector<double>>& streams,
                                          std::span<const Label> labels, double step = 0.05);

}  // namespace sigverify
