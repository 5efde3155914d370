#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sigverify/eval.hpp"
#include "sigverify/ingest.hpp"
#include "sigverify/synth.hpp"

namespace sigverify::cli {

namespace fs = std::filesystem;

struct ConvertArgs {
  fs::path input;
  fs::path output;
  std::string format = "canonical";
  std::string id;  // defaults to the input file stem
  ConvertOptions options;
};

void cmd_convert(const ConvertArgs& args);

// Empty config path selects the baseline DTW pipeline.
void cmd_compare(const fs::path& config, const fs::path& manifest, const fs::path& comparisons,
                 const fs::path& output, unsigned workers);

// Writes report.txt and det_<filter>.csv for each filter with impostors.
EvalReport cmd_eval(const fs::path& scores, const fs::path& ground_truth, const fs::path& out_dir);

// Reads <dir>/task<N>/<team>/report.txt and writes the markdown table.
RankingTable cmd_rank(const fs::path& reports_dir, const fs::path& output);

// Empty spec path uses the default spec; `seed` overrides the spec's seed.
SynthSpec cmd_synth(const fs::path& spec, const fs::path& out_dir, std::optional<std::uint64_t> seed);

void cmd_calibrate(const fs::path& config, const fs::path& manifest, const fs::path& labelled,
                   const fs::path& output, unsigned workers);

}  // namespace sigverify::cli
