#pragma once

#include "sigverify/features.hpp"
#include "sigverify/signature.hpp"

namespace sigverify {

// Resamples onto the grid t_k = k * 1000 / target_hz, k = 0..floor(T/step),
// interpolating x, y and pressure linearly. Pen state is copied from the
// latest original sample at or before t_k.
RawSignature resample_uniform(const RawSignature& sig, double target_hz = 100.0);

enum class PressurePolicy { as_is, constant_one };

// Population z-score per channel. Zero-variance channels become zeros.
// Under constant_one the pressure channel is overwritten with 1.0 instead.
TimeFunctionMatrix znorm_channels(const TimeFunctionMatrix& tfm,
                                  PressurePolicy pressure_policy = PressurePolicy::as_is);

// Removes samples whose pressure is exactly zero.
RawSignature drop_zero_pressure(const RawSignature& sig);

enum class ScaleTarget {
  unit_01,  // x, y, p min-max to [0,1]; x and y then mean-centred
  sym_11,   // x, y min-max to [-1,1]; p to [0,1]
};

// When synthesize_pressure is set and the signature has no pressure, a
// constant-1 pressure column is added. A constant pressure column scales
// to all ones.
RawSignature scale_center(const RawSignature& sig, ScaleTarget target,
                          bool synthesize_pressure = false);

}  // namespace sigverify
