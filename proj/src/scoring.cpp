#include "sigverify/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "sigverify/core.hpp"

namespace sigverify {

std::vector<double> tanh_normalize(std::span<const double> scores, double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be positive");
  if (!std::isfinite(mu)) throw ValidationError("mu must be finite");
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = 0.5 * (std::tanh(kTanhSlope * (scores[i] - mu) / sigma) + 1.0);
  }
  return out;
}

TanhParams estimate_tanh_params(std::span<const double> genuine_scores) {
  if (genuine_scores.size() < 2) {
    throw ValidationError("tanh estimation needs at least 2 genuine scores");
  }
  const auto n = static_cast<double>(genuine_scores.size());
  const double mu = std::accumulate(genuine_scores.begin(), genuine_scores.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : genuine_scores) ss += (s - mu) * (s - mu);
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) throw DegenerateInputError("genuine scores have zero spread");
  return {mu, sigma};
}

double fuse_weighted(std::span<const double> scores, std::span<const double> weights) {
  if (scores.size() != weights.size() || scores.empty()) {
    throw ValidationError("fusion needs one weight per score");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ValidationError("fusion weights must be nonnegative");
    num += weights[i] * scores[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw ValidationError("fusion weights sum to zero");
  return num / den;
}

double sigstat_local_score(double d, double g_th, double f_th, double s) {
  const double den = s * f_th - g_th;
  if (den == 0.0 || !std::isfinite(den)) {
    throw ValidationError("local threshold scorer: s * f_th equals g_th");
  }
  return (s * f_th - d) / den;
}

double sigstat_global_score(double d, double d_g_min, double d_f_med) {
  if (!(d_f_med > d_g_min)) {
    throw ValidationError("global threshold scorer: d_f_med must exceed d_g_min");
  }
  if (d < d_g_min) return 0.0;
  if (d > d_f_med) return 1.0;
  return 1.0 - (d_f_med - d) / (d_f_med - d_g_min);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SigStatThresholds estimate_sigstat_thresholds(std::span<const double> genuine_distances,
                                              std::span<const double> forgery_distances) {
  std::vector<double> g(genuine_distances.begin(), genuine_distances.end());
  std::vector<double> f(forgery_distances.begin(), forgery_distances.end());
  SigStatThresholds t;
  t.g_th = quantile(g, 0.05);
  t.f_th = quantile(f, 0.5);
  t.d_g_min = *std::min_element(g.begin(), g.end());
  t.d_f_med = t.f_th;
  return t;
}

std::vector<double> to_similarity(std::span<const double> scores, ScoreOrientation orientation) {
  std::vector<double> out(scores.begin(), scores.end());
  if (orientation == ScoreOrientation::lower_is_genuine) {
    for (double& s : out) s = -s;
  }
  return out;
}

std::vector<double> search_fusion_weights(const std::vector<std::vector<double>>& streams,
                                          std::span<const Label> labels, double step) {
  if (streams.empty()) throw ValidationError("no score streams to fuse");
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("grid step must lie in (0, 1]");
  for (const auto& s : streams) {
    if (s.size() != labels.size()) throw ValidationError("stream length differs from labels");
  }
  const auto units = static_cast<int>(std::lround(1.0 / step));
  const std::size_t k = streams.size();

  std::vector<double> best;
  double best_eer = std::numeric_limits<double>::infinity();
  std::vector<int> parts(k, 0);
  std::vector<ScoreRecord> records(labels.size());
  std::vector<double> fused_inputs(k), weights(k);

  // Enumerate compositions of `units` into k parts, first part largest first.
  std::function<void(std::size_t, int)> visit = [&](std::size_t idx, int remaining) {
    if (idx + 1 == k) {
      parts[idx] = remaining;
      for (std::size_t j = 0; j < k; ++j) weights[j] = parts[j] * step;
      for (std::size_t r = 0; r < labels.size(); ++r) {
        for (std::size_t j = 0; j < k; ++j) fused_inputs[j] = streams[j][r];
        records[r] = {fuse_weighted(fused_inputs, weights), labels[r]};
      }
      const double e = eer(records);
      if (e < best_eer) {
        best_eer = e;
        best = weights;
      }
      return;
    }
    for (int w = remaining; w >= 0; --w) {
      parts[idx] = w;
      visit(idx + 1, remaining - w);
    }
  };
  visit(0, units);
  return best;
}

}  // namespace sigverify
