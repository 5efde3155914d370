#include "commands.hpp"

#include <algorithm>
#include <regex>

#include "sigverify/core.hpp"
#include "sigverify/pipeline.hpp"

namespace sigverify::cli {

namespace {

PipelineConfig load_config(const fs::path& path) {
  if (path.empty()) return baseline_dtw_config();
  return parse_config(read_text_file(path));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

}  // namespace

void cmd_convert(const ConvertArgs& args) {
  const auto& convert = find_converter(args.format);
  RawSignature sig = convert(read_text_file(args.input), args.options);
  sig.id = args.id.empty() ? args.input.stem().string() : args.id;
  write_text_file(args.output, serialize_signature(sig));
}

void cmd_compare(const fs::path& config, const fs::path& manifest_path,
                 const fs::path& comparisons, const fs::path& output, unsigned workers) {
  const auto cfg = load_config(config);
  const auto manifest = load_manifest(manifest_path);
  const auto list = parse_comparisons(read_text_file(comparisons));
  const auto scores = score_comparisons(cfg, manifest, list, workers);
  write_text_file(output, write_scores(scores));
}

EvalReport cmd_eval(const fs::path& scores_path, const fs::path& ground_truth,
                    const fs::path& out_dir) {
  const auto scores = parse_scores(read_text_file(scores_path));
  const auto list = parse_comparisons(read_text_file(ground_truth));
  if (scores.size() != list.size()) {
    throw ValidationError("score file has " + std::to_string(scores.size()) +
                          " lines but comparison file has " + std::to_string(list.size()));
  }
  if (!list.has_ground_truth()) throw ValidationError("comparison file has no labels");
  std::vector<ScoreRecord> records;
  records.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    records.push_back({scores[i], *list.entries[i].expected});
  }
  const auto report = evaluate(records);
  ensure_dir(out_dir);
  write_text_file(out_dir / "report.txt", serialize_report(report));
  for (const auto& [filter, curve] : report.det) {
    write_text_file(out_dir / ("det_" + std::string(to_string(filter)) + ".csv"),
                    write_det_csv(curve));
  }
  return report;
}

RankingTable cmd_rank(const fs::path& reports_dir, const fs::path& output) {
  if (!fs::is_directory(reports_dir)) {
    throw IoError("'" + reports_dir.string() + "' is not a directory");
  }
  static const std::regex task_dir(R"(task([1-9][0-9]*))");
  TaskResults results;
  for (const auto& task_entry : fs::directory_iterator(reports_dir)) {
    std::smatch m;
    const auto name = task_entry.path().filename().string();
    if (!task_entry.is_directory() || !std::regex_match(name, m, task_dir)) continue;
    const int task = std::stoi(m[1]);
    for (const auto& team_entry : fs::directory_iterator(task_entry.path())) {
      const auto report = team_entry.path() / "report.txt";
      if (!team_entry.is_directory() || !fs::exists(report)) continue;
      results[task][team_entry.path().filename().string()] =
          parse_report_eer(read_text_file(report));
    }
  }
  std::erase_if(results, [](const auto& kv) { return kv.second.empty(); });
  if (results.empty()) {
    throw ValidationError("no task<N>/<team>/report.txt files under '" + reports_dir.string() +
                          "'");
  }
  auto table = rank_teams(results);
  write_text_file(output, render_ranking_markdown(table));
  return table;
}

SynthSpec cmd_synth(const fs::path& spec_path, const fs::path& out_dir,
                    std::optional<std::uint64_t> seed) {
  SynthSpec spec = spec_path.empty() ? SynthSpec{} : parse_synth_spec(read_text_file(spec_path));
  if (seed) spec.seed = *seed;
  const auto dataset = generate_synthetic(spec);
  write_synthetic(dataset, out_dir);
  write_text_file(out_dir / "synth_spec.txt", serialize_synth_spec(spec));
  return spec;
}

void cmd_calibrate(const fs::path& config, const fs::path& manifest_path,
                   const fs::path& labelled, const fs::path& output, unsigned workers) {
  const auto cfg = load_config(config);
  const auto manifest = load_manifest(manifest_path);
  const auto list = parse_comparisons(read_text_file(labelled));
  check_resolves(manifest, list);
  const auto fitted = calibrate(
      cfg, [&](const std::string& id) { return load_signature(manifest, id); }, list, workers);
  write_text_file(output, serialize_config(fitted));
}

}  // namespace sigverify::cli
