#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sigverify/core.hpp"
#include "sigverify/features.hpp"

namespace sigverify {

enum class LocalMetric { euclidean, sq_euclidean };

double local_distance(std::span<const double> a, std::span<const double> b, LocalMetric metric);

/// Monotone, continuous alignment from (0,0) to (N-1,M-1).
struct WarpingPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t size() const { return pairs.size(); }
  friend bool operator==(const WarpingPath&, const WarpingPath&) = default;
};

struct AlignmentResult {
  double cumulative_cost = 0.0;
  WarpingPath path;
  double normalized_score = 0.0;  // cumulative_cost / path.size()
};

/// Classic DTW over the three-neighbour step pattern, no band. Ties between
/// predecessors prefer (i-1,j-1), then (i-1,j), then (i,j-1).
AlignmentResult dtw(const Matrix& a, const Matrix& b, LocalMetric metric = LocalMetric::euclidean);

// Channel names must match in order; throws ValidationError otherwise.
AlignmentResult dtw(const TimeFunctionMatrix& a, const TimeFunctionMatrix& b,
                    LocalMetric metric = LocalMetric::euclidean);

/// Soft-DTW value: r(i,j) = d(i,j) + softmin_gamma of the three predecessors,
/// softmin_gamma(u) = -gamma * log(sum(exp(-u / gamma))).
double soft_dtw(const Matrix& a, const Matrix& b, double gamma,
                LocalMetric metric = LocalMetric::sq_euclidean);
double soft_dtw(const TimeFunctionMatrix& a, const TimeFunctionMatrix& b, double gamma,
                LocalMetric metric = LocalMetric::sq_euclidean);

struct SoftDtwGradients {
  double value = 0.0;
  Matrix grad_a;  // d value / d a, shape of a
  Matrix grad_b;  // d value / d b, shape of b
};

/// Value plus gradients with respect to both sequences, via the backward
/// recursion over the expected-alignment matrix.
SoftDtwGradients soft_dtw_value_and_grad(const Matrix& a, const Matrix& b, double gamma,
                                         LocalMetric metric = LocalMetric::sq_euclidean);

Matrix soft_dtw_grad(const Matrix& a, const Matrix& b, double gamma,
                     LocalMetric metric = LocalMetric::sq_euclidean);

// none: raw soft-DTW values; length_sum: each value divided by N + M.
enum class SoftDtwNormalization { none, length_sum };

struct TripletLossResult {
  double loss = 0.0;
  Matrix grad_anchor;
  Matrix grad_positive;
  Matrix grad_negative;
};

/// max(0, margin + sdtw(anchor, positive) - sdtw(anchor, negative)) with
/// gradients for all three inputs (zero when the hinge is inactive).
TripletLossResult triplet_loss(const Matrix& anchor, const Matrix& positive,
                               const Matrix& negative, double margin, double gamma,
                               SoftDtwNormalization normalization = SoftDtwNormalization::none,
                               LocalMetric metric = LocalMetric::sq_euclidean);

/// Expands both sequences along the optimal Euclidean DTW path so that
/// out.first.row(k) = a.row(i_k) and out.second.row(k) = b.row(j_k).
std::pair<Matrix, Matrix> pre_align(const Matrix& a, const Matrix& b);
std::pair<TimeFunctionMatrix, TimeFunctionMatrix> pre_align(const TimeFunctionMatrix& a,
                                                            const TimeFunctionMatrix& b);

}  // namespace sigverify
