#include "sigverify/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "sigverify/text.hpp"

namespace sigverify {

TimeFunctionMatrix::TimeFunctionMatrix(std::vector<Channel> channels, double sample_period)
    : channels_(std::move(channels)), sample_period_(sample_period) {
  if (channels_.empty()) throw ValidationError("time-function matrix needs at least one channel");
  if (!(sample_period_ > 0.0) || !std::isfinite(sample_period_)) {
    throw ValidationError("sample period must be positive");
  }
  const std::size_t n = channels_.front().values.size();
  if (n < 2) throw ValidationError("time functions need at least 2 samples");
  std::set<std::string_view> seen;
  for (const auto& ch : channels_) {
    if (ch.values.size() != n) {
      throw ValidationError("channel '" + ch.name + "' length differs from the others");
    }
    if (!seen.insert(ch.name).second) throw ValidationError("duplicate channel '" + ch.name + "'");
    for (double v : ch.values) {
      if (!std::isfinite(v)) throw ValidationError("channel '" + ch.name + "' has a non-finite value");
    }
  }
}

const Channel& TimeFunctionMatrix::channel(std::string_view name) const {
  for (const auto& ch : channels_) {
    if (ch.name == name) return ch;
  }
  throw ValidationError("no channel named '" + std::string(name) + "'");
}

bool TimeFunctionMatrix::has_channel(std::string_view name) const {
  return std::any_of(channels_.begin(), channels_.end(),
                     [&](const Channel& c) { return c.name == name; });
}

std::vector<std::string> TimeFunctionMatrix::names() const {
  std::vector<std::string> out;
  for (const auto& ch : channels_) out.push_back(ch.name);
  return out;
}

Matrix TimeFunctionMatrix::frames() const {
  Matrix m(length(), channel_count());
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    for (std::size_t n = 0; n < length(); ++n) m(n, c) = channels_[c].values[n];
  }
  return m;
}

TimeFunctionMatrix TimeFunctionMatrix::from_frames(const Matrix& frames,
                                                   const std::vector<std::string>& names,
                                                   double sample_period) {
  if (names.size() != frames.cols()) throw ValidationError("channel name count mismatch");
  std::vector<Channel> channels(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    channels[c].name = names[c];
    channels[c].values.resize(frames.rows());
    for (std::size_t n = 0; n < frames.rows(); ++n) channels[c].values[n] = frames(n, c);
  }
  return TimeFunctionMatrix(std::move(channels), sample_period);
}

GlobalFeatureVector::GlobalFeatureVector(std::vector<std::pair<std::string, double>> entries)
    : entries_(std::move(entries)) {
  std::set<std::string_view> seen;
  for (const auto& [name, v] : entries_) {
    if (!seen.insert(name).second) throw ValidationError("duplicate feature '" + name + "'");
    if (!std::isfinite(v)) throw ValidationError("feature '" + name + "' is not finite");
  }
}

double GlobalFeatureVector::value(std::string_view name) const {
  for (const auto& [n, v] : entries_) {
    if (n == name) return v;
  }
  throw ValidationError("no feature named '" + std::string(name) + "'");
}

std::vector<double> GlobalFeatureVector::values() const {
  std::vector<double> out;
  for (const auto& e : entries_) out.push_back(e.second);
  return out;
}

std::vector<std::string> GlobalFeatureVector::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

std::vector<double> derivative(std::span<const double> series, double sample_period) {
  if (!(sample_period > 0.0)) throw ValidationError("sample period must be positive");
  if (series.size() < 2) throw ValidationError("derivative needs at least 2 samples");
  std::vector<double> out(series.size(), 0.0);
  for (std::size_t n = 1; n < series.size(); ++n) {
    out[n] = (series[n] - series[n - 1]) / sample_period;
  }
  return out;
}

double estimate_sample_period(const RawSignature& sig) {
  if (sig.points.size() < 2) throw DegenerateInputError("signature '" + sig.id + "' is too short");
  const double period = sig.duration() / static_cast<double>(sig.points.size() - 1);
  if (!(period > 0.0)) throw DegenerateInputError("signature '" + sig.id + "' has zero duration");
  return period;
}

namespace {

void require_samples(const RawSignature& sig, std::size_t n) {
  if (sig.points.size() < n) {
    throw DegenerateInputError("signature '" + sig.id + "' has " +
                               std::to_string(sig.points.size()) + " samples, need at least " +
                               std::to_string(n));
  }
}

struct Coordinates {
  std::vector<double> x, y, p;
};

Coordinates coordinates(const RawSignature& sig) {
  Coordinates c;
  for (const auto& pt : sig.points) {
    c.x.push_back(pt.x);
    c.y.push_back(pt.y);
    c.p.push_back(pt.p.value_or(1.0));
  }
  return c;
}

// Direction of (dx, dy); carries the previous angle when the step is zero.
std::vector<double> heading(std::span<const double> dx, std::span<const double> dy) {
  std::vector<double> out(dx.size(), 0.0);
  double prev = 0.0;
  for (std::size_t n = 0; n < dx.size(); ++n) {
    if (dx[n] != 0.0 || dy[n] != 0.0) prev = std::atan2(dy[n], dx[n]);
    out[n] = prev;
  }
  return out;
}

// Backward difference of an angle, wrapped to [-pi, pi] before scaling.
std::vector<double> angular_derivative(std::span<const double> angle, double period) {
  std::vector<double> out(angle.size(), 0.0);
  for (std::size_t n = 1; n < angle.size(); ++n) {
    out[n] = std::remainder(angle[n] - angle[n - 1], 2.0 * std::numbers::pi) / period;
  }
  return out;
}

std::vector<double> speed(std::span<const double> dx, std::span<const double> dy) {
  std::vector<double> v(dx.size());
  for (std::size_t n = 0; n < dx.size(); ++n) v[n] = std::hypot(dx[n], dy[n]);
  return v;
}

}  // namespace

TimeFunctionMatrix extract_dlvc12(const RawSignature& sig) {
  require_samples(sig, 3);
  const double period = estimate_sample_period(sig);
  const auto c = coordinates(sig);
  const auto n = c.x.size();

  auto dx = derivative(c.x, period);
  auto dy = derivative(c.y, period);
  auto v = speed(dx, dy);
  auto theta = heading(dx, dy);
  auto dv = derivative(v, period);
  auto dtheta = angular_derivative(theta, period);

  std::vector<double> cos_t(n), sin_t(n), rho(n), cent(n), acc(n);
  for (std::size_t i = 0; i < n; ++i) {
    cos_t[i] = std::cos(theta[i]);
    sin_t[i] = std::sin(theta[i]);
    const double radius = v[i] / std::max(std::abs(dtheta[i]), kFeatureEpsilon);
    rho[i] = std::log(std::max(radius, kFeatureEpsilon));
    cent[i] = v[i] * dtheta[i];
    acc[i] = std::sqrt(dv[i] * dv[i] + cent[i] * cent[i]);
  }

  std::vector<Channel> ch;
  ch.push_back({"dx", std::move(dx)});
  ch.push_back({"dy", std::move(dy)});
  ch.push_back({"v", std::move(v)});
  ch.push_back({"theta", std::move(theta)});
  ch.push_back({"cos_theta", std::move(cos_t)});
  ch.push_back({"sin_theta", std::move(sin_t)});
  ch.push_back({std::string(kPressureChannel), c.p});
  ch.push_back({"dv", std::move(dv)});
  ch.push_back({"dtheta", std::move(dtheta)});
  ch.push_back({"rho", std::move(rho)});
  ch.push_back({"c", std::move(cent)});
  ch.push_back({"a", std::move(acc)});
  return TimeFunctionMatrix(std::move(ch), period);
}

TimeFunctionMatrix extract_sig9(const RawSignature& sig) {
  require_samples(sig, 3);
  const double period = estimate_sample_period(sig);
  const auto c = coordinates(sig);
  const auto n = c.x.size();

  auto dx = derivative(c.x, period);
  auto dy = derivative(c.y, period);
  auto v = speed(dx, dy);
  auto dv = derivative(v, period);
  auto dtheta = angular_derivative(heading(dx, dy), period);

  // Speed ratio over the last five samples. Sample 0 only carries the
  // padding value of the backward difference, so windows from n >= 1 skip it.
  std::vector<double> v5(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : std::max<std::size_t>(1, i >= 4 ? i - 4 : 0);
    auto [mn, mx] = std::minmax_element(v.begin() + static_cast<std::ptrdiff_t>(lo),
                                        v.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    v5[i] = *mn / std::max(*mx, kFeatureEpsilon);
  }

  std::vector<double> step_x(n, 0.0), step_y(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    step_x[i] = c.x[i] - c.x[i - 1];
    step_y[i] = c.y[i] - c.y[i - 1];
  }
  auto alpha = heading(step_x, step_y);
  auto dalpha = angular_derivative(alpha, period);
  std::vector<double> cos_a(n);
  for (std::size_t i = 0; i < n; ++i) cos_a[i] = std::cos(alpha[i]);

  std::vector<Channel> ch;
  ch.push_back({"x", c.x});
  ch.push_back({"y", c.y});
  ch.push_back({"v", v});
  if (sig.has_pressure()) ch.push_back({"dz", derivative(c.p, period)});
  ch.push_back({"dv", std::move(dv)});
  ch.push_back({"dtheta", std::move(dtheta)});
  ch.push_back({"v5", std::move(v5)});
  ch.push_back({"dalpha", std::move(dalpha)});
  ch.push_back({"cos_alpha", std::move(cos_a)});
  return TimeFunctionMatrix(std::move(ch), period);
}

TimeFunctionMatrix extract_baseline(const RawSignature& sig) {
  require_samples(sig, 3);
  const double period = estimate_sample_period(sig);
  const auto c = coordinates(sig);
  auto dx = derivative(c.x, period);
  auto dy = derivative(c.y, period);
  auto ddx = derivative(dx, period);
  auto ddy = derivative(dy, period);
  std::vector<Channel> ch;
  ch.push_back({"x", c.x});
  ch.push_back({"y", c.y});
  ch.push_back({"dx", std::move(dx)});
  ch.push_back({"dy", std::move(dy)});
  ch.push_back({"ddx", std::move(ddx)});
  ch.push_back({"ddy", std::move(ddy)});
  return TimeFunctionMatrix(std::move(ch), period);
}

namespace {

struct Moments {
  double frac_pos, frac_neg, mean, median, std, skew;
};

Moments moments(std::vector<double> v) {
  const auto n = static_cast<double>(v.size());
  Moments m{};
  double sum = 0.0;
  for (double x : v) {
    if (x > 0.0) m.frac_pos += 1.0;
    if (x < 0.0) m.frac_neg += 1.0;
    sum += x;
  }
  m.frac_pos /= n;
  m.frac_neg /= n;
  m.mean = sum / n;
  double m2 = 0.0, m3 = 0.0;
  for (double x : v) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m.std = std::sqrt(m2);
  m.skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  m.median = v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  return m;
}

}  // namespace

GlobalFeatureVector extract_mad13(const RawSignature& sig) {
  if (sig.points.empty()) throw DegenerateInputError("signature '" + sig.id + "' is empty");
  const auto c = coordinates(sig);
  const auto mx = moments(c.x);
  const auto my = moments(c.y);
  return GlobalFeatureVector({
      {"n_steps", static_cast<double>(sig.points.size())},
      {"frac_x_pos", mx.frac_pos},
      {"frac_x_neg", mx.frac_neg},
      {"frac_y_pos", my.frac_pos},
      {"frac_y_neg", my.frac_neg},
      {"mean_x", mx.mean},
      {"mean_y", my.mean},
      {"median_x", mx.median},
      {"median_y", my.median},
      {"std_x", mx.std},
      {"std_y", my.std},
      {"skew_x", mx.skew},
      {"skew_y", my.skew},
  });
}

GlobalFeatureVector feature_diff(const GlobalFeatureVector& enrolled,
                                 const GlobalFeatureVector& test) {
  if (enrolled.names() != test.names()) {
    throw ValidationError("feature vectors have different name lists");
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(enrolled.size());
  for (std::size_t i = 0; i < enrolled.size(); ++i) {
    out.emplace_back(enrolled.entries()[i].first,
                     std::abs(enrolled.entries()[i].second - test.entries()[i].second));
  }
  return GlobalFeatureVector(std::move(out));
}

std::string write_feature_csv(
    const std::vector<std::pair<std::string, GlobalFeatureVector>>& rows) {
  std::string out = "id";
  if (rows.empty()) return out + "\n";
  const auto names = rows.front().second.names();
  for (const auto& n : names) out += "," + n;
  out += '\n';
  for (const auto& [id, fv] : rows) {
    if (fv.names() != names) throw ValidationError("feature rows have different name lists");
    out += id;
    for (double v : fv.values()) out += "," + text::format_real(v);
    out += '\n';
  }
  return out;
}

}  // namespace sigverify
