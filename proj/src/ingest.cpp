#include "sigverify/ingest.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "sigverify/core.hpp"
#include "sigverify/text.hpp"

namespace sigverify {

namespace {

std::string at_line(std::size_t lineno) { return "line " + std::to_string(lineno) + ": "; }

}  // namespace

RawSignature parse_signature(std::string_view content, std::string id, SignatureMetadata meta) {
  RawSignature sig;
  sig.id = std::move(id);
  sig.meta = meta;

  auto all = text::lines(content);
  std::size_t lineno = 0;
  std::optional<long long> declared;
  std::size_t columns = 0;
  for (auto line : all) {
    ++lineno;
    auto tokens = text::split_ws(line);
    if (tokens.empty()) continue;
    if (!declared) {
      if (tokens.size() != 1) throw FormatError(at_line(lineno) + "header must be the point count");
      declared = text::parse_int(tokens[0]);
      if (*declared < 0) throw FormatError(at_line(lineno) + "negative point count");
      sig.points.reserve(static_cast<std::size_t>(*declared));
      continue;
    }
    if (tokens.size() < 3 || tokens.size() > 5) {
      throw FormatError(at_line(lineno) + "expected 3 to 5 columns (X Y T [P [U]])");
    }
    if (columns == 0) columns = tokens.size();
    if (tokens.size() != columns) {
      throw FormatError(at_line(lineno) + "column count differs from the first row");
    }
    SignaturePoint pt;
    pt.x = text::parse_real(tokens[0]);
    pt.y = text::parse_real(tokens[1]);
    pt.t = text::parse_real(tokens[2]);
    if (columns >= 4) pt.p = text::parse_real(tokens[3]);
    if (columns == 5) {
      if (tokens[4] == "1") {
        pt.pen_down = true;
      } else if (tokens[4] == "0") {
        pt.pen_down = false;
      } else {
        throw FormatError(at_line(lineno) + "pen state must be 0 or 1");
      }
    }
    sig.points.push_back(pt);
  }
  if (!declared) throw FormatError("missing point-count header");
  if (sig.points.size() != static_cast<std::size_t>(*declared)) {
    throw FormatError("header declares " + std::to_string(*declared) + " points but " +
                      std::to_string(sig.points.size()) + " rows were found");
  }
  if (!sig.points.empty()) {
    const double t0 = sig.points.front().t;
    for (auto& pt : sig.points) pt.t -= t0;
  }
  validate(sig);
  return sig;
}

std::string serialize_signature(const RawSignature& sig) {
  std::string out = std::to_string(sig.points.size());
  out += '\n';
  for (const auto& pt : sig.points) {
    out += text::format_real(pt.x);
    out += ' ';
    out += text::format_real(pt.y);
    out += ' ';
    out += text::format_real(pt.t);
    if (pt.p) {
      out += ' ';
      out += text::format_real(*pt.p);
      if (pt.pen_down) {
        out += ' ';
        out += *pt.pen_down ? '1' : '0';
      }
    }
    out += '\n';
  }
  return out;
}

bool ComparisonList::has_ground_truth() const {
  if (entries.empty()) return false;
  for (const auto& e : entries) {
    if (!e.expected) return false;
  }
  return true;
}

ComparisonList parse_comparisons(std::string_view content) {
  ComparisonList list;
  std::size_t lineno = 0;
  for (auto line : text::lines(content)) {
    ++lineno;
    auto tokens = text::split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw FormatError(at_line(lineno) + "expected 'reference_id probe_id [label]'");
    }
    ComparisonEntry e{std::string(tokens[0]), std::string(tokens[1]), std::nullopt};
    if (tokens.size() == 3) {
      Label l = parse_label(tokens[2]);
      if (l == Label::unknown) {
        throw ValidationError(at_line(lineno) + "'unknown' is not a ground-truth label");
      }
      e.expected = l;
    }
    list.entries.push_back(std::move(e));
  }
  if (list.entries.empty()) throw ValidationError("comparison list is empty");
  return list;
}

std::string serialize_comparisons(const ComparisonList& list, bool with_labels) {
  std::string out;
  for (const auto& e : list.entries) {
    out += e.reference_id;
    out += ' ';
    out += e.probe_id;
    if (with_labels && e.expected) {
      out += ' ';
      out += to_string(*e.expected);
    }
    out += '\n';
  }
  return out;
}

std::string write_scores(std::span<const double> scores) {
  std::string out;
  out.reserve(scores.size() * 10);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw ValidationError("score " + std::to_string(i + 1) + " is not finite");
    }
    out += text::format_fixed(scores[i], 6);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_scores(std::string_view content) {
  std::vector<double> scores;
  std::size_t lineno = 0;
  for (auto line : text::lines(content)) {
    ++lineno;
    auto tokens = text::split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 1) throw FormatError(at_line(lineno) + "expected one score per line");
    double v = text::parse_real(tokens[0]);
    if (!std::isfinite(v)) throw ValidationError(at_line(lineno) + "score is not finite");
    scores.push_back(v);
  }
  return scores;
}

const ManifestEntry& DatasetManifest::at(const std::string& id) const {
  auto it = signatures.find(id);
  if (it == signatures.end()) throw ValidationError("unknown signature id '" + id + "'");
  return it->second;
}

DatasetManifest parse_manifest(std::string_view content, const std::filesystem::path& base_dir) {
  DatasetManifest m;
  std::size_t lineno = 0;
  auto resolve = [&](std::string_view p) {
    std::filesystem::path path{std::string(p)};
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  for (auto line : text::lines(content)) {
    ++lineno;
    auto tokens = text::split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() == 3 && tokens[0] == "task") {
      auto task = text::parse_int(tokens[1]);
      if (task < 1 || task > 3) throw ValidationError(at_line(lineno) + "task must be 1, 2 or 3");
      if (!m.task_files.emplace(static_cast<int>(task), resolve(tokens[2])).second) {
        throw ValidationError(at_line(lineno) + "task declared twice");
      }
      continue;
    }
    if (tokens.size() != 5) {
      throw FormatError(at_line(lineno) + "expected 'id path tool scenario label'");
    }
    ManifestEntry e;
    e.path = resolve(tokens[1]);
    e.meta.input_tool = parse_input_tool(tokens[2]);
    e.meta.scenario = parse_scenario(tokens[3]);
    e.meta.label = parse_label(tokens[4]);
    if (!m.signatures.emplace(std::string(tokens[0]), std::move(e)).second) {
      throw ValidationError(at_line(lineno) + "duplicate signature id '" + std::string(tokens[0]) +
                            "'");
    }
  }
  return m;
}

std::string serialize_manifest(const DatasetManifest& m) {
  std::string out;
  for (const auto& [task, path] : m.task_files) {
    out += "task " + std::to_string(task) + " " + path.generic_string() + "\n";
  }
  for (const auto& [id, e] : m.signatures) {
    out += id;
    out += ' ';
    out += e.path.generic_string();
    out += ' ';
    out += to_string(e.meta.input_tool);
    out += ' ';
    out += to_string(e.meta.scenario);
    out += ' ';
    out += to_string(e.meta.label);
    out += '\n';
  }
  return out;
}

void check_resolves(const DatasetManifest& manifest, const ComparisonList& list) {
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& e = list.entries[i];
    for (const auto* id : {&e.reference_id, &e.probe_id}) {
      if (!manifest.contains(*id)) {
        throw ValidationError("comparison line " + std::to_string(i + 1) +
                              ": unresolved signature id '" + *id + "'");
      }
    }
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  auto m = parse_manifest(read_text_file(path), path.parent_path());
  for (const auto& [task, file] : m.task_files) {
    m.tasks[task] = parse_comparisons(read_text_file(file));
    check_resolves(m, m.tasks[task]);
  }
  return m;
}

RawSignature load_signature(const DatasetManifest& manifest, const std::string& id) {
  const auto& e = manifest.at(id);
  return parse_signature(read_text_file(e.path), id, e.meta);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

RawSignature convert_canonical(std::string_view content, const ConvertOptions&) {
  return parse_signature(content, "");
}

// Delimited rows with a caller-supplied column mapping; covers the usual
// "one sample per row" exports of tablet SDKs.
RawSignature convert_columns(std::string_view content, const ConvertOptions& opts) {
  int ix = -1, iy = -1, it = -1, ip = -1, iu = -1;
  for (std::size_t c = 0; c < opts.columns.size(); ++c) {
    const auto& role = opts.columns[c];
    int* slot = role == "x"   ? &ix
                : role == "y" ? &iy
                : role == "t" ? &it
                : role == "p" ? &ip
                : role == "u" ? &iu
                              : nullptr;
    if (role == "-") continue;
    if (slot == nullptr) throw ValidationError("unknown column role '" + role + "'");
    if (*slot >= 0) throw ValidationError("column role '" + role + "' given twice");
    *slot = static_cast<int>(c);
  }
  if (ix < 0 || iy < 0 || it < 0) throw ValidationError("columns must include x, y and t");

  RawSignature sig;
  auto all = text::lines(content);
  for (std::size_t i = opts.skip_lines; i < all.size(); ++i) {
    auto line = text::trim(all[i]);
    if (line.empty()) continue;
    std::vector<std::string_view> tokens;
    if (opts.delimiter == ' ') {
      tokens = text::split_ws(line);
    } else {
      for (auto tok : text::split(line, opts.delimiter)) tokens.push_back(text::trim(tok));
    }
    if (tokens.size() < opts.columns.size()) {
      throw FormatError(at_line(i + 1) + "expected " + std::to_string(opts.columns.size()) +
                        " columns");
    }
    SignaturePoint pt;
    pt.x = text::parse_real(tokens[ix]);
    pt.y = text::parse_real(tokens[iy]);
    pt.t = text::parse_real(tokens[it]) * opts.time_scale;
    if (ip >= 0) pt.p = text::parse_real(tokens[ip]);
    if (iu >= 0) pt.pen_down = text::parse_real(tokens[iu]) != 0.0;
    sig.points.push_back(pt);
  }
  if (!sig.points.empty()) {
    const double t0 = sig.points.front().t;
    for (auto& pt : sig.points) pt.t -= t0;
  }
  validate(sig);
  return sig;
}

struct Registry {
  std::mutex mu;
  std::map<std::string, Converter> converters{{"canonical", convert_canonical},
                                              {"columns", convert_columns}};
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_converter(const std::string& name, Converter fn) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.converters[name] = std::move(fn);
}

const Converter& find_converter(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.converters.find(name);
  if (it == r.converters.end()) throw ValidationError("unknown converter '" + name + "'");
  return it->second;
}

std::vector<std::string> converter_names() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> names;
  for (const auto& [k, v] : r.converters) names.push_back(k);
  return names;
}

}  // namespace sigverify
