#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

// Locale-independent text helpers shared by the file formats.
namespace sigverify::text {

std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string_view> split(std::string_view s, char delim);
std::string_view trim(std::string_view s);

// Splits into lines on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> lines(std::string_view text);

// Strict parsers: the whole token must be consumed. Throw FormatError.
double parse_real(std::string_view token);
long long parse_int(std::string_view token);
bool parse_bool(std::string_view token);

// Shortest round-trip representation.
std::string format_real(double v);
std::string format_fixed(double v, int decimals);

// "key=value" lines; blank lines and lines starting with '#' are ignored.
// Duplicate keys are a FormatError.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::string serialize_key_values(const std::map<std::string, std::string>& kv);

}  // namespace sigverify::text
