#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sigverify/ingest.hpp"

namespace sigverify {

/// Parameters of the seeded synthetic signature generator.
struct SynthSpec {
  int subjects = 20;
  int genuine_per_subject = 8;
  int skilled_per_subject = 8;
  std::uint64_t seed = 1;
  double sigma_g = 0.01;                  // genuine positional jitter
  double warp_amplitude = 0.35;           // forgery time-warp strength
  double amplitude_perturbation = 0.25;   // forgery per-component amplitude change
  int points = 200;
  double sample_rate_hz = 100.0;
  double finger_fraction = 0.5;  // share of subjects captured by finger, no pressure
};

void validate(const SynthSpec& spec);

// key=value text with the field names above.
SynthSpec parse_synth_spec(std::string_view text);
std::string serialize_synth_spec(const SynthSpec& spec);

struct SynthDataset {
  std::vector<RawSignature> signatures;
  // Task 1: stylus/office subjects. Task 2: finger/mobile subjects.
  // Task 3: a balanced mix drawn from both.
  std::map<int, ComparisonList> tasks;
};

SynthDataset generate_synthetic(const SynthSpec& spec);

// Writes signatures/<id>.txt, task<N>_comparisons.txt (no labels),
// task<N>_ground_truth.txt and manifest.txt under `dir`.
void write_synthetic(const SynthDataset& dataset, const std::filesystem::path& dir);

}  // namespace sigverify
