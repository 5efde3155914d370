#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigverify/signature.hpp"

namespace sigverify {

// Canonical signature file: first line is the point count N, followed by N
// rows of whitespace-separated "X Y T [P [U]]". The optional columns must be
// present on every row or on none. Timestamps are shifted so t[0] = 0.
RawSignature parse_signature(std::string_view text, std::string id, SignatureMetadata meta = {});

// Inverse of parse_signature; numbers use the shortest representation that
// parses back to the same double.
std::string serialize_signature(const RawSignature& sig);

struct ComparisonEntry {
  std::string reference_id;
  std::string probe_id;
  std::optional<Label> expected;

  friend bool operator==(const ComparisonEntry&, const ComparisonEntry&) = default;
};

struct ComparisonList {
  std::vector<ComparisonEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool has_ground_truth() const;
};

// One comparison per non-blank line: "reference_id probe_id [label]".
ComparisonList parse_comparisons(std::string_view text);
std::string serialize_comparisons(const ComparisonList& list, bool with_labels = true);

// One score per line, fixed six decimals. Rejects non-finite scores.
std::string write_scores(std::span<const double> scores);
std::vector<double> parse_scores(std::string_view text);

struct ManifestEntry {
  std::filesystem::path path;
  SignatureMetadata meta;
};

// Signature lines are "id path tool scenario label". Task lines are
// "task <1|2|3> <comparison file>". Relative paths resolve against the
// manifest's directory.
struct DatasetManifest {
  std::map<std::string, ManifestEntry> signatures;
  std::map<int, ComparisonList> tasks;
  std::map<int, std::filesystem::path> task_files;

  const ManifestEntry& at(const std::string& id) const;
  bool contains(const std::string& id) const { return signatures.count(id) != 0; }
};

DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
std::string serialize_manifest(const DatasetManifest& manifest);

// Reads a manifest and every task comparison file it references, then checks
// that all referenced ids resolve.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Throws ValidationError naming the first unresolved id and its line.
void check_resolves(const DatasetManifest& manifest, const ComparisonList& list);

RawSignature load_signature(const DatasetManifest& manifest, const std::string& id);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Converters from vendor layouts to the canonical format. New device
// formats register a callback under a name; the CLI `convert` command looks
// converters up by that name.
struct ConvertOptions {
  // Column roles in source order, e.g. {"x","y","t","p"}; "-" skips a column.
  std::vector<std::string> columns = {"x", "y", "t"};
  std::size_t skip_lines = 0;
  char delimiter = ' ';  // ' ' means any whitespace
  double time_scale = 1.0;  // multiply source timestamps to get milliseconds
};

using Converter = std::function<RawSignature(std::string_view text, const ConvertOptions& opts)>;

void register_converter(const std::string& name, Converter fn);
const Converter& find_converter(const std::string& name);
std::vector<std::string> converter_names();

}  // namespace sigverify
