// Independent reference implementations shared by the unit tests and the
// acceptance binary. They favour obviousness over speed.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "sigverify/alignment.hpp"
#include "sigverify/core.hpp"
#include "sigverify/eval.hpp"

namespace oracle {

using sigverify::Label;
using sigverify::LocalMetric;
using sigverify::Matrix;
using sigverify::ScoreRecord;

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

inline double pair_cost(const Matrix& a, const Matrix& b, std::size_t i, std::size_t j,
                        LocalMetric metric) {
  double ss = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    const double d = a(i, c) - b(j, c);
    ss += d * d;
  }
  return metric == LocalMetric::euclidean ? std::sqrt(ss) : ss;
}

// Minimum summed cost over every monotone, continuous path, enumerated by
// walking forward from (0,0).
inline double brute_force_dtw(const Matrix& a, const Matrix& b,
                              LocalMetric metric = LocalMetric::euclidean) {
  const std::size_t n = a.rows(), m = b.rows();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                  double acc) {
    acc += pair_cost(a, b, i, j, metric);
    if (i + 1 == n && j + 1 == m) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n) walk(i + 1, j, acc);
    if (j + 1 < m) walk(i, j + 1, acc);
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return best;
}

inline bool admitted(sigverify::ImpostorFilter f, Label l) {
  using sigverify::ImpostorFilter;
  if (l == Label::skilled_forgery) return f != ImpostorFilter::random_only;
  if (l == Label::random_forgery) return f != ImpostorFilter::skilled_only;
  return false;
}

// EER from a sweep over thresholds placed at midpoints between consecutive
// distinct scores (plus both infinities), with rates counted directly.
inline double midpoint_eer(const std::vector<ScoreRecord>& records,
                           sigverify::ImpostorFilter filter = sigverify::ImpostorFilter::all) {
  std::vector<double> distinct;
  for (const auto& r : records) {
    if (r.label == Label::genuine || admitted(filter, r.label)) distinct.push_back(r.score);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> thresholds{-std::numeric_limits<double>::infinity()};
  for (std::size_t k = 1; k < distinct.size(); ++k) {
    thresholds.push_back(0.5 * (distinct[k - 1] + distinct[k]));
  }
  thresholds.push_back(std::numeric_limits<double>::infinity());

  double prev_far = 0.0, prev_frr = 0.0;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    std::size_t gen = 0, imp = 0, rejected = 0, accepted = 0;
    for (const auto& r : records) {
      if (r.label == Label::genuine) {
        ++gen;
        if (r.score < thresholds[k]) ++rejected;
      } else if (admitted(filter, r.label)) {
        ++imp;
        if (r.score >= thresholds[k]) ++accepted;
      }
    }
    const double far = static_cast<double>(accepted) / static_cast<double>(imp);
    const double frr = static_cast<double>(rejected) / static_cast<double>(gen);
    if (far <= frr) {
      if (far == frr || k == 0) return 100.0 * far;
      const double d_prev = prev_far - prev_frr, d_cur = far - frr;
      const double lambda = d_prev / (d_prev - d_cur);
      return 100.0 * (prev_far + lambda * (far - prev_far));
    }
    prev_far = far;
    prev_frr = frr;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Truncated tensor algebra element stored per level as a flat word-indexed
// vector; level 0 is the scalar 1.
struct Tensor {
  std::size_t d;
  int depth;
  std::vector<std::vector<double>> levels;  // levels[k] has d^k entries

  Tensor(std::size_t dim, int max_depth) : d(dim), depth(max_depth), levels(max_depth + 1) {
    std::size_t size = 1;
    for (int k = 0; k <= depth; ++k) {
      levels[k].assign(size, 0.0);
      size *= d;
    }
    levels[0][0] = 1.0;
  }

  std::vector<double> flat() const {
    std::vector<double> out;
    for (int k = 1; k <= depth; ++k) out.insert(out.end(), levels[k].begin(), levels[k].end());
    return out;
  }

  static Tensor from_flat(const std::vector<double>& v, std::size_t d, int depth) {
    Tensor t(d, depth);
    std::size_t pos = 0;
    for (int k = 1; k <= depth; ++k) {
      for (double& x : t.levels[k]) x = v.at(pos++);
    }
    return t;
  }
};

// (a ⊗ b)_n = sum_{k=0..n} a_k ⊗ b_{n-k}; word (u, w) has index u*d^|w| + w.
inline Tensor tensor_product(const Tensor& a, const Tensor& b) {
  Tensor out(a.d, a.depth);
  out.levels[0][0] = 1.0;
  for (int n = 1; n <= a.depth; ++n) {
    std::fill(out.levels[n].begin(), out.levels[n].end(), 0.0);
    for (int k = 0; k <= n; ++k) {
      const auto& la = a.levels[k];
      const auto& lb = b.levels[n - k];
      for (std::size_t u = 0; u < la.size(); ++u) {
        for (std::size_t w = 0; w < lb.size(); ++w) out.levels[n][u * lb.size() + w] += la[u] * lb[w];
      }
    }
  }
  return out;
}

// exp of a single increment: level k = delta^{⊗k} / k!.
inline Tensor segment_exp(const std::vector<double>& delta, int depth) {
  const std::size_t d = delta.size();
  Tensor t(d, depth);
  for (int k = 1; k <= depth; ++k) {
    const auto& prev = t.levels[k - 1];
    for (std::size_t u = 0; u < prev.size(); ++u) {
      for (std::size_t i = 0; i < d; ++i) t.levels[k][u * d + i] = prev[u] * delta[i] / k;
    }
  }
  return t;
}

inline std::vector<double> path_signature(const Matrix& path, int depth) {
  Tensor acc(path.cols(), depth);
  for (std::size_t r = 1; r < path.rows(); ++r) {
    std::vector<double> delta(path.cols());
    for (std::size_t c = 0; c < path.cols(); ++c) delta[c] = path(r, c) - path(r - 1, c);
    acc = tensor_product(acc, segment_exp(delta, depth));
  }
  return acc.flat();
}

// Level-2 iterated integrals of a piecewise-linear path in closed form:
// S^{ij} = sum_{k<l} D_k^i D_l^j + sum_k D_k^i D_k^j / 2.
inline std::vector<double> level2_closed_form(const Matrix& path) {
  const std::size_t d = path.cols();
  std::vector<double> s(d * d, 0.0);
  for (std::size_t k = 1; k < path.rows(); ++k) {
    for (std::size_t l = k; l < path.rows(); ++l) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const double dk = path(k, i) - path(k - 1, i);
          const double dl = path(l, j) - path(l - 1, j);
          s[i * d + j] += (k == l ? 0.5 : 1.0) * dk * dl;
        }
      }
    }
  }
  return s;
}

// Central differences of f with respect to every entry of x.
inline Matrix finite_difference(const std::function<double(const Matrix&)>& f, Matrix x,
                                double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double keep = x(i, j);
      x(i, j) = keep + h;
      const double up = f(x);
      x(i, j) = keep - h;
      const double down = f(x);
      x(i, j) = keep;
      g(i, j) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

// max |g - ref| / max(max |ref|, 1e-12)
inline double relative_error(const Matrix& g, const Matrix& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < g.data().size(); ++k) {
    num = std::max(num, std::abs(g.data()[k] - ref.data()[k]));
    den = std::max(den, std::abs(ref.data()[k]));
  }
  return num / std::max(den, 1e-12);
}

}  // namespace oracle
