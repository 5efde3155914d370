#include "sigverify/signature.hpp"

#include <cmath>
#include <string>

#include "sigverify/core.hpp"

namespace sigverify {

void validate(const RawSignature& sig) {
  if (sig.points.size() < 2) {
    throw ValidationError("signature '" + sig.id + "' has fewer than 2 points");
  }
  const bool with_p = sig.points.front().p.has_value();
  const bool with_u = sig.points.front().pen_down.has_value();
  double prev_t = sig.points.front().t;
  for (std::size_t i = 0; i < sig.points.size(); ++i) {
    const auto& pt = sig.points[i];
    if (pt.p.has_value() != with_p || pt.pen_down.has_value() != with_u) {
      throw ValidationError("signature '" + sig.id + "': optional columns not uniform at point " +
                            std::to_string(i));
    }
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.t) ||
        (pt.p && !std::isfinite(*pt.p))) {
      throw ValidationError("signature '" + sig.id + "': non-finite value at point " +
                            std::to_string(i));
    }
    if (pt.p && *pt.p < 0.0) {
      throw ValidationError("signature '" + sig.id + "': negative pressure at point " +
                            std::to_string(i));
    }
    if (pt.t < prev_t) {
      throw ValidationError("signature '" + sig.id + "': decreasing timestamp at point " +
                            std::to_string(i));
    }
    prev_t = pt.t;
  }
}

std::string_view to_string(InputTool v) {
  return v == InputTool::stylus ? "stylus" : "finger";
}

std::string_view to_string(Scenario v) {
  return v == Scenario::office ? "office" : "mobile";
}

std::string_view to_string(Label v) {
  switch (v) {
    case Label::genuine:
      return "genuine";
    case Label::skilled_forgery:
      return "skilled_forgery";
    case Label::random_forgery:
      return "random_forgery";
    case Label::unknown:
      break;
  }
  return "unknown";
}

InputTool parse_input_tool(std::string_view s) {
  if (s == "stylus") return InputTool::stylus;
  if (s == "finger") return InputTool::finger;
  throw ValidationError("unknown input tool '" + std::string(s) + "'");
}

Scenario parse_scenario(std::string_view s) {
  if (s == "office") return Scenario::office;
  if (s == "mobile") return Scenario::mobile;
  throw ValidationError("unknown scenario '" + std::string(s) + "'");
}

Label parse_label(std::string_view s) {
  if (s == "genuine") return Label::genuine;
  if (s == "skilled_forgery") return Label::skilled_forgery;
  if (s == "random_forgery") return Label::random_forgery;
  if (s == "unknown") return Label::unknown;
  throw ValidationError("unknown label '" + std::string(s) + "'");
}

}  // namespace sigverify
