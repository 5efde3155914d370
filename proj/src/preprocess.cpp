#include "sigverify/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sigverify {

RawSignature resample_uniform(const RawSignature& sig, double target_hz) {
  if (!(target_hz > 0.0) || !std::isfinite(target_hz)) {
    throw ValidationError("target rate must be positive");
  }
  validate(sig);
  const double duration = sig.duration();
  if (!(duration > 0.0)) {
    throw DegenerateInputError("signature '" + sig.id + "' has zero duration");
  }
  const double step = 1000.0 / target_hz;
  const double t0 = sig.points.front().t;
  const auto count = static_cast<std::size_t>(std::floor(duration / step * (1.0 + 1e-12))) + 1;

  RawSignature out;
  out.id = sig.id;
  out.meta = sig.meta;
  out.points.reserve(count);

  const auto& src = sig.points;
  std::size_t i = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double grid_t = static_cast<double>(k) * step;
    const double t = std::min(t0 + grid_t, src.back().t);
    while (i + 1 < src.size() && src[i + 1].t <= t) ++i;

    SignaturePoint pt;
    pt.t = grid_t;
    pt.pen_down = src[i].pen_down;
    if (i + 1 == src.size() || src[i].t == t) {
      pt.x = src[i].x;
      pt.y = src[i].y;
      pt.p = src[i].p;
    } else {
      const auto& a = src[i];
      const auto& b = src[i + 1];
      const double f = (t - a.t) / (b.t - a.t);
      pt.x = a.x + f * (b.x - a.x);
      pt.y = a.y + f * (b.y - a.y);
      if (a.p) pt.p = *a.p + f * (*b.p - *a.p);
    }
    out.points.push_back(pt);
  }
  if (out.points.size() < 2) {
    throw DegenerateInputError("signature '" + sig.id + "' is shorter than one resampling step");
  }
  return out;
}

TimeFunctionMatrix znorm_channels(const TimeFunctionMatrix& tfm, PressurePolicy pressure_policy) {
  std::vector<Channel> out;
  out.reserve(tfm.channel_count());
  for (const auto& ch : tfm.channels()) {
    Channel c{ch.name, ch.values};
    if (pressure_policy == PressurePolicy::constant_one && ch.name == kPressureChannel) {
      std::fill(c.values.begin(), c.values.end(), 1.0);
      out.push_back(std::move(c));
      continue;
    }
    const auto n = static_cast<double>(c.values.size());
    const double mean = std::accumulate(c.values.begin(), c.values.end(), 0.0) / n;
    double ss = 0.0;
    double max_abs = 0.0;
    for (double v : c.values) {
      ss += (v - mean) * (v - mean);
      max_abs = std::max(max_abs, std::abs(v));
    }
    const double sd = std::sqrt(ss / n);
    if (sd <= 1e-12 * max_abs || sd == 0.0) {
      std::fill(c.values.begin(), c.values.end(), 0.0);
    } else {
      for (double& v : c.values) v = (v - mean) / sd;
    }
    out.push_back(std::move(c));
  }
  return TimeFunctionMatrix(std::move(out), tfm.sample_period());
}

RawSignature drop_zero_pressure(const RawSignature& sig) {
  if (!sig.has_pressure()) {
    throw ValidationError("signature '" + sig.id + "' carries no pressure");
  }
  RawSignature out;
  out.id = sig.id;
  out.meta = sig.meta;
  for (const auto& pt : sig.points) {
    if (*pt.p > 0.0) out.points.push_back(pt);
  }
  if (out.points.size() < 2) {
    throw DegenerateInputError("signature '" + sig.id +
                               "' has fewer than 2 samples with nonzero pressure");
  }
  const double t0 = out.points.front().t;
  for (auto& pt : out.points) pt.t -= t0;
  return out;
}

namespace {

struct Range {
  double lo;
  double hi;
  double span() const { return hi - lo; }
};

template <typename Get>
Range range_of(const std::vector<SignaturePoint>& pts, Get get) {
  Range r{get(pts.front()), get(pts.front())};
  for (const auto& pt : pts) {
    r.lo = std::min(r.lo, get(pt));
    r.hi = std::max(r.hi, get(pt));
  }
  return r;
}

}  // namespace

RawSignature scale_center(const RawSignature& sig, ScaleTarget target, bool synthesize_pressure) {
  validate(sig);
  const Range rx = range_of(sig.points, [](const SignaturePoint& p) { return p.x; });
  const Range ry = range_of(sig.points, [](const SignaturePoint& p) { return p.y; });
  if (!(rx.span() > 0.0) || !(ry.span() > 0.0)) {
    throw DegenerateInputError("signature '" + sig.id + "' has zero extent in x or y");
  }
  RawSignature out = sig;
  const bool had_pressure = sig.has_pressure();
  if (had_pressure) {
    const Range rp = range_of(sig.points, [](const SignaturePoint& p) { return *p.p; });
    for (auto& pt : out.points) {
      pt.p = rp.span() > 0.0 ? (*pt.p - rp.lo) / rp.span() : 1.0;
    }
  } else if (synthesize_pressure) {
    for (auto& pt : out.points) pt.p = 1.0;
  }

  if (target == ScaleTarget::sym_11) {
    for (auto& pt : out.points) {
      pt.x = 2.0 * (pt.x - rx.lo) / rx.span() - 1.0;
      pt.y = 2.0 * (pt.y - ry.lo) / ry.span() - 1.0;
    }
    return out;
  }

  double mx = 0.0;
  double my = 0.0;
  for (auto& pt : out.points) {
    pt.x = (pt.x - rx.lo) / rx.span();
    pt.y = (pt.y - ry.lo) / ry.span();
    mx += pt.x;
    my += pt.y;
  }
  mx /= static_cast<double>(out.points.size());
  my /= static_cast<double>(out.points.size());
  for (auto& pt : out.points) {
    pt.x -= mx;
    pt.y -= my;
  }
  return out;
}

}  // namespace sigverify
