#pragma once

#include <span>
#include <vector>

#include "sigverify/core.hpp"
#include "sigverify/features.hpp"
#include "sigverify/signature.hpp"

namespace sigverify {

class UnsupportedDepthError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

inline constexpr int kMaxSignatureDepth = 4;

// d + d^2 + ... + d^depth
std::size_t signature_dimension(std::size_t d, int depth);

/// Truncated signature of the piecewise-linear path through the rows of
/// `path` (N x d, N >= 2). Levels 1..depth are concatenated; within level k
/// the coefficient for word (i1, ..., ik) sits at row-major offset with i1
/// most significant. Level 1 is the total displacement.
std::vector<double> path_signature(const Matrix& path, int depth);

/// Truncated tensor product of two signatures with implicit level-0 term 1
/// (Chen's concatenation rule).
std::vector<double> signature_product(std::span<const double> a, std::span<const double> b,
                                      std::size_t d, int depth);

// Path channels x, y, dx, dy, p, plus the segment normal (-dy, dx) when
// `with_normal` is set. Missing pressure contributes a constant-1 column.
Matrix signature_path_channels(const RawSignature& sig, bool with_normal = false);

// Path signature of signature_path_channels() as named global features,
// e.g. "S[x]", "S[x,dy]".
GlobalFeatureVector extract_path_signature_features(const RawSignature& sig, int depth,
                                                    bool with_normal = false);

}  // namespace sigverify
