#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sigverify/core.hpp"
#include "sigverify/signature.hpp"

namespace sigverify {

struct Channel {
  std::string name;
  std::vector<double> values;

  friend bool operator==(const Channel&, const Channel&) = default;
};

/// Per-sample time functions of one signature, stored channel-major.
/// All channels share one length N >= 2 and hold only finite values.
class TimeFunctionMatrix {
 public:
  TimeFunctionMatrix(std::vector<Channel> channels, double sample_period);

  std::size_t length() const { return channels_.front().values.size(); }
  std::size_t channel_count() const { return channels_.size(); }
  double sample_period() const { return sample_period_; }

  const std::vector<Channel>& channels() const { return channels_; }
  const Channel& channel(std::size_t i) const { return channels_.at(i); }
  // Throws ValidationError if absent.
  const Channel& channel(std::string_view name) const;
  bool has_channel(std::string_view name) const;
  std::vector<std::string> names() const;

  // N x C row-major copy, the layout the aligners work on.
  Matrix frames() const;
  static TimeFunctionMatrix from_frames(const Matrix& frames, const std::vector<std::string>& names,
                                        double sample_period);

  friend bool operator==(const TimeFunctionMatrix&, const TimeFunctionMatrix&) = default;

 private:
  std::vector<Channel> channels_;
  double sample_period_;
};

/// Fixed-length named summary of one signature. Names are unique, values finite.
class GlobalFeatureVector {
 public:
  GlobalFeatureVector() = default;
  explicit GlobalFeatureVector(std::vector<std::pair<std::string, double>> entries);

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
  double value(std::string_view name) const;
  std::vector<double> values() const;
  std::vector<std::string> names() const;

  friend bool operator==(const GlobalFeatureVector&, const GlobalFeatureVector&) = default;

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

// Channel name used for pressure by every extractor; preprocessing policies
// key on it.
inline constexpr std::string_view kPressureChannel = "z";

// Clamp for the log and ratio singularities (curvature radius, speed ratio).
inline constexpr double kFeatureEpsilon = 1e-8;

// Backward first difference: out[n] = (s[n] - s[n-1]) / period, out[0] = 0.
std::vector<double> derivative(std::span<const double> series, double sample_period);

// Twelve time functions: dx, dy, v, theta, cos_theta, sin_theta, z, dv,
// dtheta, rho, c, a. Missing pressure yields a constant-1 z channel.
TimeFunctionMatrix extract_dlvc12(const RawSignature& sig);

// x, y, v, dz, dv, dtheta, v5, dalpha, cos_alpha; dz is dropped when the
// signature has no pressure (7 channels).
TimeFunctionMatrix extract_sig9(const RawSignature& sig);

// x, y, dx, dy, ddx, ddy.
TimeFunctionMatrix extract_baseline(const RawSignature& sig);

// Thirteen global statistics over the coordinates: sample count, sign
// fractions, mean, median, population std and skewness of x and y.
GlobalFeatureVector extract_mad13(const RawSignature& sig);

// Entrywise |enrolled - test|. Name lists must match exactly.
GlobalFeatureVector feature_diff(const GlobalFeatureVector& enrolled,
                                 const GlobalFeatureVector& test);

// CSV with header "id,<names...>" and one row per signature. All vectors
// must share the same names.
std::string write_feature_csv(
    const std::vector<std::pair<std::string, GlobalFeatureVector>>& rows);

// Sample period in ms estimated from the timestamps (mean spacing).
double estimate_sample_period(const RawSignature& sig);

}  // namespace sigverify
