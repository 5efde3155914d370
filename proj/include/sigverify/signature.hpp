#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sigverify {

struct SignaturePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;  // milliseconds since the first sample
  std::optional<double> p;  // pressure, device units
  std::optional<bool> pen_down;

  friend bool operator==(const SignaturePoint&, const SignaturePoint&) = default;
};

enum class InputTool { stylus, finger };
enum class Scenario { office, mobile };
enum class Label { genuine, skilled_forgery, random_forgery, unknown };

struct SignatureMetadata {
  InputTool input_tool = InputTool::stylus;
  Scenario scenario = Scenario::office;
  Label label = Label::unknown;

  friend bool operator==(const SignatureMetadata&, const SignatureMetadata&) = default;
};

struct RawSignature {
  std::string id;
  std::vector<SignaturePoint> points;
  SignatureMetadata meta;

  std::size_t size() const { return points.size(); }
  bool has_pressure() const { return !points.empty() && points.front().p.has_value(); }
  bool has_pen_state() const { return !points.empty() && points.front().pen_down.has_value(); }
  double duration() const { return points.empty() ? 0.0 : points.back().t - points.front().t; }

  friend bool operator==(const RawSignature&, const RawSignature&) = default;
};

// Throws ValidationError when the signature breaks a structural invariant:
// fewer than 2 points, non-uniform optional columns, decreasing or
// non-finite timestamps, negative pressure.
void validate(const RawSignature& sig);

std::string_view to_string(InputTool v);
std::string_view to_string(Scenario v);
std::string_view to_string(Label v);

// Parsers throw ValidationError on unknown tokens.
InputTool parse_input_tool(std::string_view s);
Scenario parse_scenario(std::string_view s);
Label parse_label(std::string_view s);

}  // namespace sigverify
