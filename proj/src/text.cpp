#include "sigverify/text.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "sigverify/core.hpp"

namespace sigverify::text {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    auto end = pos == std::string_view::npos ? text.size() : pos;
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || token.empty()) {
    throw FormatError("not a number: '" + std::string(token) + "'");
  }
  return v;
}

long long parse_int(std::string_view token) {
  long long v = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || token.empty()) {
    throw FormatError("not an integer: '" + std::string(token) + "'");
  }
  return v;
}

bool parse_bool(std::string_view token) {
  if (token == "true" || token == "1") return true;
  if (token == "false" || token == "0") return false;
  throw FormatError("not a boolean: '" + std::string(token) + "'");
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double v, int decimals) {
  std::array<char, 512> buf{};
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf.data(), ptr);
}

std::map<std::string, std::string> parse_key_values(std::string_view content) {
  std::map<std::string, std::string> kv;
  std::size_t lineno = 0;
  for (auto raw : lines(content)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw FormatError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw FormatError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::string serialize_key_values(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace sigverify::text
