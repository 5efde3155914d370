#include "sigverify/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigverify/core.hpp"
#include "sigverify/text.hpp"

namespace sigverify {

std::string_view to_string(ImpostorFilter f) {
  switch (f) {
    case ImpostorFilter::skilled_only:
      return "skilled";
    case ImpostorFilter::random_only:
      return "random";
    case ImpostorFilter::all:
      break;
  }
  return "all";
}

namespace {

struct Split {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

bool admits(ImpostorFilter f, Label l) {
  switch (f) {
    case ImpostorFilter::all:
      return l == Label::skilled_forgery || l == Label::random_forgery;
    case ImpostorFilter::skilled_only:
      return l == Label::skilled_forgery;
    case ImpostorFilter::random_only:
      return l == Label::random_forgery;
  }
  return false;
}

Split split(std::span<const ScoreRecord> records, ImpostorFilter filter) {
  Split s;
  for (const auto& r : records) {
    if (!std::isfinite(r.score)) throw ValidationError("score record is not finite");
    if (r.label == Label::unknown) throw ValidationError("score record has no label");
    if (r.label == Label::genuine) {
      s.genuine.push_back(r.score);
    } else if (admits(filter, r.label)) {
      s.impostor.push_back(r.score);
    }
  }
  if (s.genuine.empty()) throw ValidationError("no genuine comparisons to evaluate");
  if (s.impostor.empty()) {
    throw ValidationError("no impostor comparisons for filter '" + std::string(to_string(filter)) +
                          "'");
  }
  std::sort(s.genuine.begin(), s.genuine.end());
  std::sort(s.impostor.begin(), s.impostor.end());
  return s;
}

ErrorRates rates(const Split& s, double threshold) {
  const auto gen_below = std::lower_bound(s.genuine.begin(), s.genuine.end(), threshold);
  const auto imp_below = std::lower_bound(s.impostor.begin(), s.impostor.end(), threshold);
  const auto rejected = static_cast<double>(gen_below - s.genuine.begin());
  const auto accepted = static_cast<double>(s.impostor.end() - imp_below);
  return {accepted / static_cast<double>(s.impostor.size()),
          rejected / static_cast<double>(s.genuine.size())};
}

}  // namespace

std::vector<DetPoint> far_frr_curve(std::span<const ScoreRecord> records, ImpostorFilter filter) {
  const auto s = split(records, filter);
  std::vector<double> thresholds;
  thresholds.reserve(s.genuine.size() + s.impostor.size() + 2);
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  std::merge(s.genuine.begin(), s.genuine.end(), s.impostor.begin(), s.impostor.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  std::vector<DetPoint> curve;
  curve.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto r = rates(s, t);
    curve.push_back({t, r.far, r.frr});
  }
  return curve;
}

ErrorRates rates_at(std::span<const ScoreRecord> records, ImpostorFilter filter, double threshold) {
  return rates(split(records, filter), threshold);
}

double eer_from_curve(std::span<const DetPoint> curve) {
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const auto& p = curve[k];
    if (p.far > p.frr) continue;
    if (p.far == p.frr || k == 0) return 100.0 * p.far;
    const auto& q = curve[k - 1];
    const double d_prev = q.far - q.frr;
    const double d_cur = p.far - p.frr;
    const double lambda = d_prev / (d_prev - d_cur);
    return 100.0 * (q.far + lambda * (p.far - q.far));
  }
  throw ValidationError("error-rate curve never crosses");
}

double eer(std::span<const ScoreRecord> records, ImpostorFilter filter) {
  return eer_from_curve(far_frr_curve(records, filter));
}

ForgeryBreakdown forgery_breakdown(std::span<const ScoreRecord> records) {
  const bool has_skilled = std::any_of(records.begin(), records.end(), [](const ScoreRecord& r) {
    return r.label == Label::skilled_forgery;
  });
  const bool has_random = std::any_of(records.begin(), records.end(), [](const ScoreRecord& r) {
    return r.label == Label::random_forgery;
  });
  if (!has_skilled || !has_random) {
    throw ValidationError("forgery breakdown needs both skilled and random forgeries");
  }
  return {eer(records, ImpostorFilter::skilled_only), eer(records, ImpostorFilter::random_only)};
}

EvalReport evaluate(std::span<const ScoreRecord> records) {
  EvalReport report;
  for (const auto& r : records) {
    switch (r.label) {
      case Label::genuine:
        ++report.count_genuine;
        break;
      case Label::skilled_forgery:
        ++report.count_skilled;
        break;
      case Label::random_forgery:
        ++report.count_random;
        break;
      case Label::unknown:
        throw ValidationError("score record has no label");
    }
  }
  auto run = [&](ImpostorFilter f, std::optional<double>& slot) {
    auto curve = far_frr_curve(records, f);
    slot = eer_from_curve(curve);
    report.det.emplace(f, std::move(curve));
  };
  if (report.count_skilled + report.count_random > 0) run(ImpostorFilter::all, report.eer_overall);
  if (report.count_skilled > 0) run(ImpostorFilter::skilled_only, report.eer_skilled);
  if (report.count_random > 0) run(ImpostorFilter::random_only, report.eer_random);
  if (report.count_genuine == 0) throw ValidationError("no genuine comparisons to evaluate");
  return report;
}

std::string serialize_report(const EvalReport& report) {
  auto fmt = [](const std::optional<double>& v) {
    return v ? text::format_fixed(*v, 2) : std::string("n/a");
  };
  std::map<std::string, std::string> kv;
  kv["eer_overall"] = fmt(report.eer_overall);
  kv["eer_skilled"] = fmt(report.eer_skilled);
  kv["eer_random"] = fmt(report.eer_random);
  kv["count_genuine"] = std::to_string(report.count_genuine);
  kv["count_skilled_forgery"] = std::to_string(report.count_skilled);
  kv["count_random_forgery"] = std::to_string(report.count_random);
  return text::serialize_key_values(kv);
}

double parse_report_eer(std::string_view report_text) {
  const auto kv = text::parse_key_values(report_text);
  auto it = kv.find("eer_overall");
  if (it == kv.end()) throw FormatError("report has no eer_overall");
  if (it->second == "n/a") throw ValidationError("report has no overall EER");
  return text::parse_real(it->second);
}

std::string write_det_csv(std::span<const DetPoint> curve) {
  std::string out = "threshold,far,frr\n";
  for (const auto& p : curve) {
    out += text::format_real(p.threshold);
    out += ',';
    out += text::format_real(p.far);
    out += ',';
    out += text::format_real(p.frr);
    out += '\n';
  }
  return out;
}

RankingTable rank_teams(const TaskResults& results) {
  static constexpr int kMedalPoints[] = {3, 2, 1};
  RankingTable table;
  std::map<std::string, TeamTotal> totals;

  for (const auto& [task, teams] : results) {
    if (teams.empty()) throw ValidationError("task " + std::to_string(task) + " has no teams");
    TaskRanking tr;
    tr.task = task;
    for (const auto& [team, e] : teams) {
      if (!std::isfinite(e)) throw ValidationError("EER for team '" + team + "' is not finite");
      tr.entries.push_back({team, e, 0, false});
    }
    // map iteration already orders by team id; stable sort keeps it for ties
    std::stable_sort(tr.entries.begin(), tr.entries.end(),
                     [](const RankedEntry& a, const RankedEntry& b) { return a.eer < b.eer; });
    for (std::size_t i = 0; i < tr.entries.size(); ++i) {
      auto& entry = tr.entries[i];
      entry.points = i < 3 ? kMedalPoints[i] : 0;
      const bool tie_prev = i > 0 && tr.entries[i - 1].eer == entry.eer;
      const bool tie_next = i + 1 < tr.entries.size() && tr.entries[i + 1].eer == entry.eer;
      entry.tied = tie_prev || tie_next;
      table.has_ties = table.has_ties || entry.tied;

      auto& total = totals[entry.team];
      total.team = entry.team;
      total.points_per_task[task] = entry.points;
      total.total += entry.points;
    }
    table.tasks.push_back(std::move(tr));
  }

  for (auto& [team, t] : totals) table.totals.push_back(std::move(t));
  std::stable_sort(table.totals.begin(), table.totals.end(),
                   [](const TeamTotal& a, const TeamTotal& b) { return a.total > b.total; });
  return table;
}

std::string render_ranking_markdown(const RankingTable& table) {
  std::string out;
  for (const auto& tr : table.tasks) {
    out += "## Task " + std::to_string(tr.task) + "\n\n";
    out += "| Position | Team | EER (%) | Points |\n";
    out += "|---|---|---|---|\n";
    for (std::size_t i = 0; i < tr.entries.size(); ++i) {
      const auto& e = tr.entries[i];
      out += "| " + std::to_string(i + 1) + " | " + e.team + (e.tied ? " (tie)" : "") + " | " +
             text::format_fixed(e.eer, 2) + " | " + std::to_string(e.points) + " |\n";
    }
    out += "\n";
  }

  out += "## Global ranking\n\n| Position | Team |";
  for (const auto& tr : table.tasks) out += " Task " + std::to_string(tr.task) + " |";
  out += " Total Points |\n|---|---|";
  for (std::size_t i = 0; i < table.tasks.size(); ++i) out += "---|";
  out += "---|\n";
  for (std::size_t i = 0; i < table.totals.size(); ++i) {
    const auto& t = table.totals[i];
    out += "| " + std::to_string(i + 1) + " | " + t.team + " |";
    for (const auto& tr : table.tasks) {
      auto it = t.points_per_task.find(tr.task);
      out += " " + (it == t.points_per_task.end() ? std::string("-") : std::to_string(it->second)) +
             " |";
    }
    out += " " + std::to_string(t.total) + " |\n";
  }
  if (table.has_ties) {
    out += "\nTies were broken by team id.\n";
  }
  return out;
}

}  // namespace sigverify
