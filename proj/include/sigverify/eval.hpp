#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigverify/signature.hpp"

namespace sigverify {

/// One comparison outcome. Scores are higher-is-genuine; label must not be
/// Label::unknown.
struct ScoreRecord {
  double score = 0.0;
  Label label = Label::genuine;
};

enum class ImpostorFilter { all, skilled_only, random_only };

std::string_view to_string(ImpostorFilter f);

struct DetPoint {
  double threshold;
  double far;  // fraction of impostors with score >= threshold
  double frr;  // fraction of genuines with score < threshold

  friend bool operator==(const DetPoint&, const DetPoint&) = default;
};

struct ErrorRates {
  double far;
  double frr;
};

/// Sweep over -inf, every distinct score ascending, +inf. A comparison is
/// accepted iff score >= threshold, so FAR is non-increasing and FRR
/// non-decreasing along the curve. Throws ValidationError when either class
/// is empty after filtering.
std::vector<DetPoint> far_frr_curve(std::span<const ScoreRecord> records,
                                    ImpostorFilter filter = ImpostorFilter::all);

ErrorRates rates_at(std::span<const ScoreRecord> records, ImpostorFilter filter, double threshold);

/// EER in percent. Taken at the first sweep point where FAR <= FRR; when the
/// two rates differ there, the crossing is linearly interpolated against the
/// previous sweep point.
double eer(std::span<const ScoreRecord> records, ImpostorFilter filter = ImpostorFilter::all);
double eer_from_curve(std::span<const DetPoint> curve);

struct ForgeryBreakdown {
  double eer_skilled;
  double eer_random;
};

// Requires both forgery types to be present.
ForgeryBreakdown forgery_breakdown(std::span<const ScoreRecord> records);

struct EvalReport {
  // Absent when the filter leaves no impostors.
  std::optional<double> eer_overall;
  std::optional<double> eer_skilled;
  std::optional<double> eer_random;
  std::map<ImpostorFilter, std::vector<DetPoint>> det;
  std::size_t count_genuine = 0;
  std::size_t count_skilled = 0;
  std::size_t count_random = 0;
};

EvalReport evaluate(std::span<const ScoreRecord> records);

// Flat key=value text; EERs with two decimals, "n/a" when absent.
std::string serialize_report(const EvalReport& report);
// Reads eer_overall back from a serialized report.
double parse_report_eer(std::string_view report_text);

// "threshold,far,frr" rows with a header line.
std::string write_det_csv(std::span<const DetPoint> curve);

struct RankedEntry {
  std::string team;
  double eer = 0.0;
  int points = 0;
  bool tied = false;  // shares its EER with another team in this task
};

struct TaskRanking {
  int task = 0;
  std::vector<RankedEntry> entries;  // EER ascending, ties by team id
};

struct TeamTotal {
  std::string team;
  std::map<int, int> points_per_task;
  int total = 0;
};

struct RankingTable {
  std::vector<TaskRanking> tasks;
  std::vector<TeamTotal> totals;  // total descending, ties by team id
  bool has_ties = false;
};

using TaskResults = std::map<int, std::map<std::string, double>>;

/// Per task, the three lowest EERs earn 3, 2 and 1 points.
RankingTable rank_teams(const TaskResults& results);
std::string render_ranking_markdown(const RankingTable& table);

}  // namespace sigverify
