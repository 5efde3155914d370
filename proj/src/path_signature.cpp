#include "sigverify/path_signature.hpp"

#include <string>

namespace sigverify {

std::size_t signature_dimension(std::size_t d, int depth) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (int k = 1; k <= depth; ++k) {
    level *= d;
    total += level;
  }
  return total;
}

namespace {

void check_depth(int depth) {
  if (depth < 1) throw ValidationError("signature depth must be at least 1");
  if (depth > kMaxSignatureDepth) {
    throw UnsupportedDepthError("signature depth " + std::to_string(depth) + " exceeds " +
                                std::to_string(kMaxSignatureDepth));
  }
}

// Offsets of each level inside the flat layout; offsets[k-1] starts level k.
std::vector<std::size_t> level_offsets(std::size_t d, int depth) {
  std::vector<std::size_t> off(static_cast<std::size_t>(depth) + 1, 0);
  std::size_t level = 1;
  for (int k = 1; k <= depth; ++k) {
    level *= d;
    off[static_cast<std::size_t>(k)] = off[static_cast<std::size_t>(k) - 1] + level;
  }
  return off;
}

// exp(delta) truncated: level k is delta^{(x)k} / k!.
std::vector<double> segment_signature(std::span<const double> delta, int depth,
                                      const std::vector<std::size_t>& off) {
  const std::size_t d = delta.size();
  std::vector<double> out(off.back(), 0.0);
  for (std::size_t i = 0; i < d; ++i) out[i] = delta[i];
  for (int k = 2; k <= depth; ++k) {
    const auto prev = off[static_cast<std::size_t>(k) - 2];
    const auto prev_len = off[static_cast<std::size_t>(k) - 1] - prev;
    const auto cur = off[static_cast<std::size_t>(k) - 1];
    for (std::size_t w = 0; w < prev_len; ++w) {
      for (std::size_t i = 0; i < d; ++i) {
        out[cur + w * d + i] = out[prev + w] * delta[i] / static_cast<double>(k);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> signature_product(std::span<const double> a, std::span<const double> b,
                                      std::size_t d, int depth) {
  check_depth(depth);
  const auto off = level_offsets(d, depth);
  if (a.size() != off.back() || b.size() != off.back()) {
    throw ValidationError("signature length does not match dimension and depth");
  }
  std::vector<double> out(off.back(), 0.0);
  for (int k = 1; k <= depth; ++k) {
    const auto ok = off[static_cast<std::size_t>(k) - 1];
    const auto len_k = off[static_cast<std::size_t>(k)] - ok;
    // level 0 of either side is 1
    for (std::size_t w = 0; w < len_k; ++w) out[ok + w] = a[ok + w] + b[ok + w];
    for (int j = 1; j < k; ++j) {
      const auto oa = off[static_cast<std::size_t>(j) - 1];
      const auto la = off[static_cast<std::size_t>(j)] - oa;
      const auto ob = off[static_cast<std::size_t>(k - j) - 1];
      const auto lb = off[static_cast<std::size_t>(k - j)] - ob;
      for (std::size_t u = 0; u < la; ++u) {
        const double au = a[oa + u];
        if (au == 0.0) continue;
        for (std::size_t v = 0; v < lb; ++v) out[ok + u * lb + v] += au * b[ob + v];
      }
    }
  }
  return out;
}

std::vector<double> path_signature(const Matrix& path, int depth) {
  check_depth(depth);
  if (path.cols() < 1) throw ValidationError("path needs at least one dimension");
  if (path.rows() < 2) throw DegenerateInputError("path needs at least 2 points");
  const std::size_t d = path.cols();
  const auto off = level_offsets(d, depth);

  std::vector<double> sig(off.back(), 0.0);
  std::vector<double> delta(d);
  for (std::size_t n = 1; n < path.rows(); ++n) {
    for (std::size_t i = 0; i < d; ++i) delta[i] = path(n, i) - path(n - 1, i);
    auto seg = segment_signature(delta, depth, off);
    sig = signature_product(sig, seg, d, depth);
  }
  // level 1 telescopes to the displacement; take it without summation error
  for (std::size_t i = 0; i < d; ++i) sig[i] = path(path.rows() - 1, i) - path(0, i);
  return sig;
}

Matrix signature_path_channels(const RawSignature& sig, bool with_normal) {
  const double period = estimate_sample_period(sig);
  std::vector<double> x, y, p;
  for (const auto& pt : sig.points) {
    x.push_back(pt.x);
    y.push_back(pt.y);
    p.push_back(pt.p.value_or(1.0));
  }
  const auto dx = derivative(x, period);
  const auto dy = derivative(y, period);
  Matrix m(x.size(), with_normal ? 7 : 5);
  for (std::size_t n = 0; n < x.size(); ++n) {
    m(n, 0) = x[n];
    m(n, 1) = y[n];
    m(n, 2) = dx[n];
    m(n, 3) = dy[n];
    m(n, 4) = p[n];
    if (with_normal) {
      m(n, 5) = -dy[n];
      m(n, 6) = dx[n];
    }
  }
  return m;
}

GlobalFeatureVector extract_path_signature_features(const RawSignature& sig, int depth,
                                                    bool with_normal) {
  static const std::vector<std::string> kNames = {"x", "y", "dx", "dy", "p", "nx", "ny"};
  const auto path = signature_path_channels(sig, with_normal);
  const auto values = path_signature(path, depth);
  const std::size_t d = path.cols();

  std::vector<std::pair<std::string, double>> entries;
  entries.reserve(values.size());
  std::vector<std::size_t> word;
  std::size_t idx = 0;
  for (int k = 1; k <= depth; ++k) {
    word.assign(static_cast<std::size_t>(k), 0);
    for (;;) {
      std::string name = "S[";
      for (std::size_t j = 0; j < word.size(); ++j) {
        if (j > 0) name += ',';
        name += kNames[word[j]];
      }
      name += ']';
      entries.emplace_back(std::move(name), values[idx++]);
      // odometer increment, last letter fastest
      std::size_t pos = word.size();
      while (pos > 0 && ++word[pos - 1] == d) word[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return GlobalFeatureVector(std::move(entries));
}

}  // namespace sigverify
