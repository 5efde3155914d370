#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sigverify/eval.hpp"
#include "sigverify/scoring.hpp"

using namespace sigverify;

namespace {

std::vector<ScoreRecord> records(std::vector<double> genuine, std::vector<double> impostor,
                                 Label impostor_label = Label::skilled_forgery) {
  std::vector<ScoreRecord> out;
  for (double g : genuine) out.push_back({g, Label::genuine});
  for (double i : impostor) out.push_back({i, impostor_label});
  return out;
}

std::vector<ScoreRecord> random_records(std::mt19937_64& rng, std::size_t max_size) {
  std::uniform_int_distribution<std::size_t> size(2, max_size);
  std::uniform_int_distribution<int> label(0, 2), coarse(0, 5);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = size(rng);
  std::vector<ScoreRecord> out;
  out.push_back({noise(rng), Label::genuine});
  out.push_back({noise(rng), Label::skilled_forgery});
  while (out.size() < n) {
    const int l = label(rng);
    // coarse values force ties between classes
    const double s = rng() % 2 ? coarse(rng) * 0.5 : noise(rng) + (l == 0 ? 0.8 : 0.0);
    out.push_back({s, l == 0 ? Label::genuine : l == 1 ? Label::skilled_forgery : Label::random_forgery});
  }
  return out;
}

}  // namespace

TEST(Curve, HandSweep) {
  const auto r = records({0.9, 0.7, 0.6}, {0.65, 0.3, 0.2});
  const auto at_066 = rates_at(r, ImpostorFilter::all, 0.66);
  EXPECT_EQ(at_066.far, 0.0);
  EXPECT_DOUBLE_EQ(at_066.frr, 1.0 / 3.0);
  const auto at_06 = rates_at(r, ImpostorFilter::all, 0.6);
  EXPECT_DOUBLE_EQ(at_06.far, 1.0 / 3.0);
  EXPECT_EQ(at_06.frr, 0.0);
}

TEST(Curve, SeparableAndDegenerate) {
  const auto sep = far_frr_curve(records({0.9, 0.8}, {0.1, 0.2}));
  EXPECT_TRUE(std::any_of(sep.begin(), sep.end(),
                          [](const DetPoint& p) { return p.far == 0.0 && p.frr == 0.0; }));

  const auto same = far_frr_curve(records({0.5, 0.5}, {0.5}));
  for (const auto& p : same) {
    EXPECT_TRUE((p.far == 1.0 && p.frr == 0.0) || (p.far == 0.0 && p.frr == 1.0));
  }
}

TEST(Curve, EmptyClassRejected) {
  EXPECT_THROW(far_frr_curve(records({0.5}, {})), ValidationError);
  EXPECT_THROW(far_frr_curve(records({}, {0.5})), ValidationError);
  EXPECT_THROW(far_frr_curve(records({0.5}, {0.2}, Label::skilled_forgery), ImpostorFilter::random_only),
               ValidationError);
}

TEST(Curve, Monotone) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = random_records(rng, 30);
    const auto curve = far_frr_curve(r);
    for (std::size_t k = 1; k < curve.size(); ++k) {
      EXPECT_LT(curve[k - 1].threshold, curve[k].threshold);
      EXPECT_LE(curve[k].far, curve[k - 1].far);
      EXPECT_GE(curve[k].frr, curve[k - 1].frr);
    }
  }
}

TEST(Eer, Examples) {
  EXPECT_EQ(eer(records({0.9, 0.8}, {0.1, 0.2})), 0.0);
  EXPECT_EQ(eer(records({0.8, 0.4}, {0.6, 0.2})), 50.0);
}

TEST(Eer, SwapLabelsAndNegate) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 50; ++trial) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> g(5), i(7);
    for (double& x : g) x = n(rng) + 1.0;
    for (double& x : i) x = n(rng);
    std::vector<double> ng, ni;
    for (double x : g) ng.push_back(-x);
    for (double x : i) ni.push_back(-x);
    EXPECT_DOUBLE_EQ(eer(records(g, i)), eer(records(ni, ng)));
  }
}

TEST(Eer, MatchesMidpointOracle) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = random_records(rng, 12);
    for (auto f : {ImpostorFilter::all, ImpostorFilter::skilled_only, ImpostorFilter::random_only}) {
      const bool has = std::any_of(r.begin(), r.end(),
                                   [&](const ScoreRecord& x) { return oracle::admitted(f, x.label); });
      if (!has) continue;
      const double got = eer(r, f);
      EXPECT_EQ(got, oracle::midpoint_eer(r, f));
      EXPECT_GE(got, 0.0);
      EXPECT_LE(got, 100.0);
    }
  }
}

TEST(Eer, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 100; ++trial) {
    auto r = random_records(rng, 20);
    const double base = eer(r);
    std::vector<double> s;
    for (const auto& x : r) s.push_back(x.score);
    const auto t = tanh_normalize(s, 0.1, 0.5);
    auto mapped = r, affine = r;
    for (std::size_t k = 0; k < r.size(); ++k) {
      mapped[k].score = t[k];
      affine[k].score = 3.0 * r[k].score - 7.0;
    }
    EXPECT_NEAR(eer(mapped), base, 1e-9);
    EXPECT_NEAR(eer(affine), base, 1e-9);
  }
}

TEST(Breakdown, Examples) {
  std::vector<ScoreRecord> r = records({0.9, 0.8, 0.7}, {0.85, 0.3});
  r.push_back({0.1, Label::random_forgery});
  r.push_back({0.05, Label::random_forgery});
  const auto b = forgery_breakdown(r);
  EXPECT_EQ(b.eer_random, 0.0);
  EXPECT_EQ(b.eer_skilled, eer(r, ImpostorFilter::skilled_only));

  std::vector<ScoreRecord> sym = records({0.9, 0.4}, {0.6, 0.2});
  sym.push_back({0.6, Label::random_forgery});
  sym.push_back({0.2, Label::random_forgery});
  const auto s = forgery_breakdown(sym);
  EXPECT_EQ(s.eer_skilled, s.eer_random);

  EXPECT_THROW(forgery_breakdown(records({0.9}, {0.1})), ValidationError);
}

TEST(Breakdown, MatchesManualFiltering) {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = random_records(rng, 40);
    r.push_back({0.0, Label::random_forgery});
    std::vector<ScoreRecord> skilled, random;
    for (const auto& x : r) {
      if (x.label != Label::random_forgery) skilled.push_back(x);
      if (x.label != Label::skilled_forgery) random.push_back(x);
    }
    const auto b = forgery_breakdown(r);
    EXPECT_EQ(b.eer_skilled, eer(skilled));
    EXPECT_EQ(b.eer_random, eer(random));
  }
}

TEST(Report, SerializeAndParse) {
  std::vector<ScoreRecord> r = records({0.9, 0.8}, {0.1});
  const auto rep = evaluate(r);
  EXPECT_EQ(rep.count_genuine, 2u);
  EXPECT_FALSE(rep.eer_random.has_value());
  const auto text = serialize_report(rep);
  EXPECT_EQ(text,
            "count_genuine=2\ncount_random_forgery=0\ncount_skilled_forgery=1\n"
            "eer_overall=0.00\neer_random=n/a\neer_skilled=0.00\n");
  EXPECT_EQ(parse_report_eer(text), 0.0);
  EXPECT_EQ(write_det_csv(rep.det.at(ImpostorFilter::all)).substr(0, 17), "threshold,far,frr");
}

TEST(Ranking, PaperFinalEvaluation) {
  const TaskResults results = {
      {1, {{"DLVC-Lab", 3.33}, {"BiDA-Lab", 4.08}, {"TUSUR KIBEVS", 6.44}, {"SIG", 7.50},
           {"MaD", 9.83}, {"SigStat", 11.75}, {"Baseline DTW", 13.08}}},
      {2, {{"DLVC-Lab", 7.41}, {"BiDA-Lab", 8.67}, {"SIG", 10.14}, {"SigStat", 13.29},
           {"TUSUR KIBEVS", 13.39}, {"Baseline DTW", 14.92}, {"MaD", 17.23}, {"JAIRG", 18.43}}},
      {3, {{"DLVC-Lab", 6.04}, {"BiDA-Lab", 7.63}, {"SIG", 9.96}, {"TUSUR KIBEVS", 11.42},
           {"MaD", 14.21}, {"SigStat", 14.48}, {"Baseline DTW", 14.67}}},
  };
  const auto table = rank_teams(results);
  std::map<std::string, int> totals;
  for (const auto& t : table.totals) totals[t.team] = t.total;
  EXPECT_EQ(totals.at("DLVC-Lab"), 9);
  EXPECT_EQ(totals.at("BiDA-Lab"), 6);
  EXPECT_EQ(totals.at("SIG"), 2);
  EXPECT_EQ(totals.at("TUSUR KIBEVS"), 1);
  EXPECT_EQ(totals.at("MaD"), 0);
  EXPECT_EQ(table.totals.front().team, "DLVC-Lab");
  EXPECT_FALSE(table.has_ties);
  for (const auto& t : table.totals) {
    int sum = 0;
    for (auto [task, pts] : t.points_per_task) {
      EXPECT_TRUE(pts == 0 || pts == 1 || pts == 2 || pts == 3);
      sum += pts;
    }
    EXPECT_EQ(sum, t.total);
  }
  EXPECT_EQ(render_ranking_markdown(table), render_ranking_markdown(rank_teams(results)));
}

TEST(Ranking, SingleTeamAndTies) {
  const auto one = rank_teams({{1, {{"solo", 5.0}}}});
  EXPECT_EQ(one.totals.front().total, 3);

  const auto tie = rank_teams({{1, {{"beta", 2.0}, {"alpha", 2.0}, {"gamma", 1.0}}}});
  const auto& e = tie.tasks.front().entries;
  EXPECT_EQ(e[0].team, "gamma");
  EXPECT_EQ(e[1].team, "alpha");
  EXPECT_EQ(e[2].team, "beta");
  EXPECT_TRUE(e[1].tied && e[2].tied);
  EXPECT_FALSE(e[0].tied);
  EXPECT_TRUE(tie.has_ties);
  const auto md = render_ranking_markdown(tie);
  EXPECT_NE(md.find("alpha (tie)"), std::string::npos);
  EXPECT_NE(md.find("Ties were broken by team id."), std::string::npos);
  EXPECT_THROW(rank_teams({{1, {}}}), ValidationError);
}
