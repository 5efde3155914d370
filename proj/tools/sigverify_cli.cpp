// sigverify: batch scoring, evaluation, ranking and synthetic data.
//
// Exit codes: 0 success, 2 validation or format error, 3 I/O error.

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "sigverify/core.hpp"
#include "sigverify/text.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

}  // namespace

int main(int argc, char** argv) {
  namespace cli = sigverify::cli;
  CLI::App app{"On-line signature verification toolkit"};
  app.require_subcommand(1);

  std::string config, manifest, comparisons, out, scores, spec, input;
  unsigned workers = 1;

  auto* convert = app.add_subcommand("convert", "Convert a device file to the canonical format");
  cli::ConvertArgs conv;
  std::string columns = "x,y,t", delimiter = " ";
  convert->add_option("input", input, "Source file")->required();
  convert->add_option("--out", out, "Canonical output file")->required();
  convert->add_option("--format", conv.format, "Converter name")->capture_default_str();
  convert->add_option("--id", conv.id, "Signature id (default: input file stem)");
  convert->add_option("--columns", columns, "Column roles x,y,t,p,u or - to skip")
      ->capture_default_str();
  convert->add_option("--skip-lines", conv.options.skip_lines, "Header lines to skip");
  convert->add_option("--delimiter", delimiter, "Field delimiter (space = any whitespace)");
  convert->add_option("--time-scale", conv.options.time_scale, "Multiplier to milliseconds");

  auto* compare = app.add_subcommand("compare", "Score a comparison list");
  compare->add_option("--config", config, "Pipeline config (default: baseline DTW)");
  compare->add_option("--manifest", manifest, "Dataset manifest")->required();
  compare->add_option("--comparisons", comparisons, "Comparison list")->required();
  compare->add_option("--out", out, "Score file")->required();
  compare->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* eval = app.add_subcommand("eval", "Compute EER report and DET curves");
  eval->add_option("--scores", scores, "Score file")->required();
  eval->add_option("--comparisons", comparisons, "Comparison list with labels")->required();
  eval->add_option("--out", out, "Output directory")->required();

  auto* rank = app.add_subcommand("rank", "Rank teams from per-task reports");
  rank->add_option("reports", input, "Directory holding task<N>/<team>/report.txt")->required();
  rank->add_option("--out", out, "Markdown ranking table")->required();

  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
  std::optional<std::uint64_t> seed;
  synth->add_option("--spec", spec, "Synthetic spec (key=value)");
  synth->add_option("--seed", seed, "Override the spec seed");
  synth->add_option("--out", out, "Output directory")->required();

  auto* calib = app.add_subcommand("calibrate", "Fit scorer parameters on labelled comparisons");
  calib->add_option("--config", config, "Pipeline config (default: baseline DTW)");
  calib->add_option("--manifest", manifest, "Dataset manifest")->required();
  calib->add_option("--comparisons", comparisons, "Labelled comparison list")->required();
  calib->add_option("--out", out, "Calibrated config")->required();
  calib->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1u, 256u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*convert) {
      conv.input = input;
      conv.output = out;
      conv.options.columns.clear();
      for (auto c : sigverify::text::split(columns, ',')) {
        conv.options.columns.emplace_back(sigverify::text::trim(c));
      }
      if (delimiter.size() != 1) throw sigverify::ValidationError("delimiter must be one character");
      conv.options.delimiter = delimiter[0];
      cli::cmd_convert(conv);
    } else if (*compare) {
      cli::cmd_compare(config, manifest, comparisons, out, workers);
    } else if (*eval) {
      const auto report = cli::cmd_eval(scores, comparisons, out);
      std::cout << sigverify::serialize_report(report);
    } else if (*rank) {
      cli::cmd_rank(input, out);
    } else if (*synth) {
      cli::cmd_synth(spec, out, seed);
    } else if (*calib) {
      cli::cmd_calibrate(config, manifest, comparisons, out, workers);
    }
  } catch (const sigverify::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const sigverify::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
