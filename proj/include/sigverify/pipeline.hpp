#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sigverify/alignment.hpp"
#include "sigverify/features.hpp"
#include "sigverify/ingest.hpp"
#include "sigverify/preprocess.hpp"
#include "sigverify/scoring.hpp"

namespace sigverify {

enum class PreprocessStep { resample, drop_zero_pressure, scale_unit01, scale_sym11 };
enum class ExtractorKind { baseline, dlvc12, sig9, mad13, pathsig };
enum class MatcherKind { dtw, softdtw, feature_l1 };
enum class ThresholdScorer { none, sigstat_local, sigstat_global };
// auto: constant_one for finger captures and signatures without pressure.
enum class PressureMode { automatic, as_is, constant_one };

/// One verification branch: preprocessing, extraction, matching and the
/// scorer chain that maps a raw distance to a higher-is-genuine score.
struct BranchConfig {
  std::vector<PreprocessStep> preprocess;
  double resample_hz = 100.0;

  ExtractorKind extractor = ExtractorKind::baseline;
  bool znorm = true;
  PressureMode pressure = PressureMode::automatic;
  int path_depth = 2;
  bool path_normal = false;

  MatcherKind matcher = MatcherKind::dtw;
  LocalMetric metric = LocalMetric::euclidean;
  double gamma = 0.1;
  bool path_normalize = true;  // dtw: divide by path length
  SoftDtwNormalization softdtw_normalization = SoftDtwNormalization::none;

  ThresholdScorer threshold = ThresholdScorer::none;
  double sigstat_s = 2.0;
  double g_th = 0.0;
  double f_th = 1.0;
  double d_g_min = 0.0;
  double d_f_med = 1.0;

  // Orientation of the stream after the threshold scorer; inferred when unset.
  std::optional<ScoreOrientation> orientation;
  bool tanh = false;
  double tanh_mu = 0.0;
  double tanh_sigma = 1.0;

  ScoreOrientation effective_orientation() const;
};

struct PipelineConfig {
  std::vector<std::pair<std::string, BranchConfig>> branches;
  std::vector<double> fusion_weights;  // one per branch when there are several
};

// Throws ValidationError when a parameter violates its operation's
// precondition or the extractor/matcher pair is incompatible.
void validate(const PipelineConfig& config);

// Flat key=value text. Single-branch configs use bare keys
// ("matcher.gamma=0.1"); multi-branch configs list "branches=a,b" and prefix
// each key with the branch name ("a.matcher.gamma=0.1").
PipelineConfig parse_config(std::string_view text);
std::string serialize_config(const PipelineConfig& config);

PipelineConfig baseline_dtw_config();

using Prepared = std::variant<TimeFunctionMatrix, GlobalFeatureVector>;

Prepared prepare(const RawSignature& sig, const BranchConfig& branch);

// Raw distance (lower means more similar). Sequence extractors whose
// channel sets differ, e.g. a pressure channel present on one side only,
// are compared over their shared channels.
double branch_distance(const Prepared& reference, const Prepared& probe,
                       const BranchConfig& branch);

// Threshold scorer, orientation conversion, then optional tanh mapping.
double branch_score(double distance, const BranchConfig& branch);

double fuse_branch_scores(std::span<const double> branch_scores, const PipelineConfig& config);

using SignatureLoader = std::function<RawSignature(const std::string& id)>;

// distances[b][k]: raw distance of comparison k under branch b. Work is
// spread over `workers` threads; results do not depend on the count.
std::vector<std::vector<double>> compute_branch_distances(const PipelineConfig& config,
                                                          const SignatureLoader& load,
                                                          const ComparisonList& comparisons,
                                                          unsigned workers = 1);

std::vector<double> score_comparisons(const PipelineConfig& config, const SignatureLoader& load,
                                      const ComparisonList& comparisons, unsigned workers = 1);

std::vector<double> score_comparisons(const PipelineConfig& config,
                                      const DatasetManifest& manifest,
                                      const ComparisonList& comparisons, unsigned workers = 1);

/// Fits the scorer parameters on labelled development comparisons: SigStat
/// thresholds from distance quantiles, tanh (mu, sigma) from genuine scores,
/// fusion weights by simplex grid search.
PipelineConfig calibrate(const PipelineConfig& config, const SignatureLoader& load,
                         const ComparisonList& labelled, unsigned workers = 1);

}  // namespace sigverify
