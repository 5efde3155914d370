#include "sigverify/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace sigverify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_compatible(const Matrix& a, const Matrix& b) {
  if (a.rows() == 0 || b.rows() == 0) throw ValidationError("cannot align an empty sequence");
  if (a.cols() == 0) throw ValidationError("sequences need at least one channel");
  if (a.cols() != b.cols()) {
    throw ValidationError("channel count mismatch: " + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.cols()));
  }
}

void check_compatible(const TimeFunctionMatrix& a, const TimeFunctionMatrix& b) {
  if (a.names() != b.names()) throw ValidationError("time-function channel sets differ");
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("soft-DTW gamma must be positive");
  }
}

enum Step : std::uint8_t { kDiagonal, kVertical, kHorizontal };

// N x M local cost table.
Matrix cost_table(const Matrix& a, const Matrix& b, LocalMetric metric) {
  Matrix d(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) d(i, j) = local_distance(a.row(i), b.row(j), metric);
  }
  return d;
}

double softmin3(double a, double b, double c, double gamma) {
  const double m = std::min({a, b, c});
  if (m == kInf) return kInf;
  const double s =
      std::exp(-(a - m) / gamma) + std::exp(-(b - m) / gamma) + std::exp(-(c - m) / gamma);
  return m - gamma * std::log(s);
}

// (N+1) x (M+1) soft accumulated costs, R(0,0) = 0, other borders +inf.
Matrix soft_accumulate(const Matrix& d, double gamma) {
  const std::size_t n = d.rows(), m = d.cols();
  Matrix r(n + 1, m + 1, kInf);
  r(0, 0) = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      r(i, j) = d(i - 1, j - 1) + softmin3(r(i - 1, j), r(i, j - 1), r(i - 1, j - 1), gamma);
    }
  }
  return r;
}

void accumulate_local_grad(std::span<const double> x, std::span<const double> y, double weight,
                           LocalMetric metric, std::span<double> out) {
  if (weight == 0.0) return;
  if (metric == LocalMetric::sq_euclidean) {
    for (std::size_t c = 0; c < x.size(); ++c) out[c] += weight * 2.0 * (x[c] - y[c]);
    return;
  }
  const double norm = local_distance(x, y, LocalMetric::euclidean);
  if (norm == 0.0) return;  // subgradient 0 at coincident points
  for (std::size_t c = 0; c < x.size(); ++c) out[c] += weight * (x[c] - y[c]) / norm;
}

}  // namespace

double local_distance(std::span<const double> a, std::span<const double> b, LocalMetric metric) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    s += diff * diff;
  }
  return metric == LocalMetric::sq_euclidean ? s : std::sqrt(s);
}

AlignmentResult dtw(const Matrix& a, const Matrix& b, LocalMetric metric) {
  check_compatible(a, b);
  const std::size_t n = a.rows(), m = b.rows();
  Matrix acc(n, m);
  std::vector<std::uint8_t> step(n * m, kDiagonal);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = local_distance(a.row(i), b.row(j), metric);
      if (i == 0 && j == 0) {
        acc(i, j) = d;
        continue;
      }
      double best = kInf;
      std::uint8_t choice = kDiagonal;
      if (i > 0 && j > 0) best = acc(i - 1, j - 1);
      if (i > 0 && acc(i - 1, j) < best) {
        best = acc(i - 1, j);
        choice = kVertical;
      }
      if (j > 0 && acc(i, j - 1) < best) {
        best = acc(i, j - 1);
        choice = kHorizontal;
      }
      acc(i, j) = best + d;
      step[i * m + j] = choice;
    }
  }

  AlignmentResult out;
  out.cumulative_cost = acc(n - 1, m - 1);
  auto& pairs = out.path.pairs;
  std::size_t i = n - 1, j = m - 1;
  pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    switch (step[i * m + j]) {
      case kDiagonal:
        --i;
        --j;
        break;
      case kVertical:
        --i;
        break;
      default:
        --j;
        break;
    }
    pairs.emplace_back(i, j);
  }
  std::reverse(pairs.begin(), pairs.end());
  out.normalized_score = out.cumulative_cost / static_cast<double>(pairs.size());
  return out;
}

AlignmentResult dtw(const TimeFunctionMatrix& a, const TimeFunctionMatrix& b, LocalMetric metric) {
  check_compatible(a, b);
  return dtw(a.frames(), b.frames(), metric);
}

double soft_dtw(const Matrix& a, const Matrix& b, double gamma, LocalMetric metric) {
  check_gamma(gamma);
  check_compatible(a, b);
  const auto r = soft_accumulate(cost_table(a, b, metric), gamma);
  return r(a.rows(), b.rows());
}

double soft_dtw(const TimeFunctionMatrix& a, const TimeFunctionMatrix& b, double gamma,
                LocalMetric metric) {
  check_compatible(a, b);
  return soft_dtw(a.frames(), b.frames(), gamma, metric);
}

SoftDtwGradients soft_dtw_value_and_grad(const Matrix& a, const Matrix& b, double gamma,
                                         LocalMetric metric) {
  check_gamma(gamma);
  check_compatible(a, b);
  const std::size_t n = a.rows(), m = b.rows();
  const Matrix d = cost_table(a, b, metric);
  const Matrix r_fwd = soft_accumulate(d, gamma);

  // Padded (N+2) x (M+2) tables, 1-based interior.
  Matrix r(n + 2, m + 2, -kInf);
  Matrix dp(n + 2, m + 2, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      r(i, j) = r_fwd(i, j);
      dp(i, j) = d(i - 1, j - 1);
    }
  }
  r(n + 1, m + 1) = r_fwd(n, m);

  Matrix e(n + 2, m + 2, 0.0);
  e(n + 1, m + 1) = 1.0;
  for (std::size_t i = n; i >= 1; --i) {
    for (std::size_t j = m; j >= 1; --j) {
      const double wa = std::exp((r(i + 1, j) - r(i, j) - dp(i + 1, j)) / gamma);
      const double wb = std::exp((r(i, j + 1) - r(i, j) - dp(i, j + 1)) / gamma);
      const double wc = std::exp((r(i + 1, j + 1) - r(i, j) - dp(i + 1, j + 1)) / gamma);
      e(i, j) = e(i + 1, j) * wa + e(i, j + 1) * wb + e(i + 1, j + 1) * wc;
    }
  }

  SoftDtwGradients out;
  out.value = r_fwd(n, m);
  out.grad_a = Matrix(n, a.cols());
  out.grad_b = Matrix(m, b.cols());
  std::vector<double> tmp(a.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = e(i + 1, j + 1);
      std::fill(tmp.begin(), tmp.end(), 0.0);
      accumulate_local_grad(a.row(i), b.row(j), w, metric, tmp);
      auto ga = out.grad_a.row(i);
      auto gb = out.grad_b.row(j);
      for (std::size_t c = 0; c < tmp.size(); ++c) {
        ga[c] += tmp[c];
        gb[c] -= tmp[c];
      }
    }
  }
  return out;
}

Matrix soft_dtw_grad(const Matrix& a, const Matrix& b, double gamma, LocalMetric metric) {
  return soft_dtw_value_and_grad(a, b, gamma, metric).grad_a;
}

TripletLossResult triplet_loss(const Matrix& anchor, const Matrix& positive,
                               const Matrix& negative, double margin, double gamma,
                               SoftDtwNormalization normalization, LocalMetric metric) {
  if (!(margin >= 0.0) || !std::isfinite(margin)) {
    throw ValidationError("triplet margin must be nonnegative");
  }
  check_compatible(anchor, positive);
  check_compatible(anchor, negative);
  const auto pos = soft_dtw_value_and_grad(anchor, positive, gamma, metric);
  const auto neg = soft_dtw_value_and_grad(anchor, negative, gamma, metric);

  double scale_pos = 1.0, scale_neg = 1.0;
  if (normalization == SoftDtwNormalization::length_sum) {
    scale_pos = 1.0 / static_cast<double>(anchor.rows() + positive.rows());
    scale_neg = 1.0 / static_cast<double>(anchor.rows() + negative.rows());
  }

  TripletLossResult out;
  out.grad_anchor = Matrix(anchor.rows(), anchor.cols());
  out.grad_positive = Matrix(positive.rows(), positive.cols());
  out.grad_negative = Matrix(negative.rows(), negative.cols());
  const double hinge = margin + scale_pos * pos.value - scale_neg * neg.value;
  if (!(hinge > 0.0)) return out;

  out.loss = hinge;
  auto ga = out.grad_anchor.data();
  for (std::size_t k = 0; k < ga.size(); ++k) {
    ga[k] = scale_pos * pos.grad_a.data()[k] - scale_neg * neg.grad_a.data()[k];
  }
  auto gp = out.grad_positive.data();
  for (std::size_t k = 0; k < gp.size(); ++k) gp[k] = scale_pos * pos.grad_b.data()[k];
  auto gn = out.grad_negative.data();
  for (std::size_t k = 0; k < gn.size(); ++k) gn[k] = -scale_neg * neg.grad_b.data()[k];
  return out;
}

std::pair<Matrix, Matrix> pre_align(const Matrix& a, const Matrix& b) {
  const auto result = dtw(a, b, LocalMetric::euclidean);
  const auto len = result.path.size();
  Matrix out_a(len, a.cols()), out_b(len, b.cols());
  for (std::size_t k = 0; k < len; ++k) {
    const auto [i, j] = result.path.pairs[k];
    std::copy_n(a.row(i).begin(), a.cols(), out_a.row(k).begin());
    std::copy_n(b.row(j).begin(), b.cols(), out_b.row(k).begin());
  }
  return {std::move(out_a), std::move(out_b)};
}

std::pair<TimeFunctionMatrix, TimeFunctionMatrix> pre_align(const TimeFunctionMatrix& a,
                                                            const TimeFunctionMatrix& b) {
  check_compatible(a, b);
  auto [fa, fb] = pre_align(a.frames(), b.frames());
  const auto names = a.names();
  return {TimeFunctionMatrix::from_frames(fa, names, a.sample_period()),
          TimeFunctionMatrix::from_frames(fb, names, b.sample_period())};
}

}  // namespace sigverify
