#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "footprint/components.hpp"
#include "footprint/evaluation.hpp"
#include "test_support.hpp"

namespace footprint {
namespace {

// Instance map from rectangles painted in order; earlier rectangles keep
// contested pixels. Empty instances are dropped and ids made dense.
InstanceMap rect_instances(std::size_t h, std::size_t w,
                           const std::vector<std::array<std::size_t, 4>>& rects) {
  Raster<std::uint32_t> lab(h, w, 0u);
  std::uint32_t id = 0;
  for (const auto& r : rects) {
    ++id;
    for (std::size_t y = r[0]; y < std::min(h, r[0] + r[2]); ++y) {
      for (std::size_t x = r[1]; x < std::min(w, r[1] + r[3]); ++x) {
        if (lab(y, x) == 0) lab(y, x) = id;
      }
    }
  }
  std::vector<std::uint32_t> remap(id + 1, 0);
  std::uint32_t next = 0;
  for (std::uint32_t k = 1; k <= id; ++k) {
    if (std::count(lab.values().begin(), lab.values().end(), k) > 0) remap[k] = ++next;
  }
  for (auto& v : lab.values()) v = remap[v];
  return {lab, next};
}

TEST(PixelScores, Examples) {
  const BinaryMask a = testing::block(20, 20, 0, 0, 10, 10);
  PixelScores s = pixel_scores(a, a);
  EXPECT_EQ(s.fscore, 1.0);
  EXPECT_EQ(s.iou, 1.0);
  EXPECT_EQ(pixel_scores(a, testing::block(20, 20, 10, 10, 10, 10)).fscore, 0.0);
  s = pixel_scores(a, testing::block(20, 20, 0, 5, 10, 10));
  EXPECT_EQ(s.counts, (EvalCounts{50, 50, 50}));
  EXPECT_DOUBLE_EQ(s.fscore, 0.5);
  EXPECT_DOUBLE_EQ(s.iou, 1.0 / 3.0);
  s = pixel_scores(BinaryMask(3, 3), BinaryMask(3, 3));
  EXPECT_EQ(s.fscore, 1.0);
  EXPECT_EQ(s.iou, 1.0);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_THROW(pixel_scores(a, BinaryMask(20, 19)), ValidationError);
}

TEST(PixelScores, IouFscoreIdentity) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const BinaryMask p = testing::random_mask(rng, 6, 7, 0.05 * (t % 20));
    const BinaryMask g = testing::random_mask(rng, 6, 7, 0.05 * ((t / 20) % 20));
    const PixelScores s = pixel_scores(p, g);
    EXPECT_NEAR(s.iou, s.fscore / (2.0 - s.fscore), 1e-12);
  }
}

TEST(InstanceIou, Examples) {
  const BinaryMask a = testing::block(20, 20, 0, 0, 10, 10);
  EXPECT_EQ(instance_iou(a, a), 1.0);
  EXPECT_NEAR(instance_iou(a, testing::block(20, 20, 0, 1, 10, 10)), 90.0 / 110.0, 1e-15);
  EXPECT_NEAR(instance_iou(a, testing::block(20, 20, 0, 5, 10, 10)), 50.0 / 150.0, 1e-15);
  EXPECT_THROW(instance_iou(BinaryMask(4, 4), BinaryMask(4, 4)), ValidationError);
}

TEST(Match, Examples) {
  const InstanceMap gt = rect_instances(20, 30, {{2, 2, 10, 10}});
  MatchResult m = match_instances(gt, gt);
  EXPECT_EQ(m.counts, (EvalCounts{1, 0, 0}));
  m = match_instances(rect_instances(20, 30, {{2, 3, 10, 10}}), gt);
  EXPECT_EQ(m.counts, (EvalCounts{1, 0, 0}));
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_NEAR(m.pairs[0].iou, 0.8182, 5e-5);
  m = match_instances(rect_instances(20, 30, {{2, 7, 10, 10}}), gt);
  EXPECT_EQ(m.counts, (EvalCounts{0, 1, 1}));
  EXPECT_EQ(m.unmatched_pred, std::vector<std::uint32_t>{1});
  EXPECT_EQ(m.unmatched_gt, std::vector<std::uint32_t>{1});
  EXPECT_THROW(match_instances(gt, rect_instances(20, 31, {})), ValidationError);
}

TEST(Match, OverlappingPairsAgainstDirectIou) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 30; ++t) {
    std::vector<std::array<std::size_t, 4>> pr, gr;
    for (int k = 0; k < 4; ++k) {
      pr.push_back({rng() % 20, rng() % 20, 2 + rng() % 8, 2 + rng() % 8});
      gr.push_back({rng() % 20, rng() % 20, 2 + rng() % 8, 2 + rng() % 8});
    }
    const InstanceMap p = rect_instances(24, 24, pr), g = rect_instances(24, 24, gr);
    std::vector<MatchPair> expected;
    for (std::uint32_t i = 1; i <= p.max_label; ++i) {
      for (std::uint32_t j = 1; j <= g.max_label; ++j) {
        const BinaryMask a = instance_support(p, i), b = instance_support(g, j);
        if (count_set(mask_and(a, b)) == 0) continue;
        expected.push_back({i, j, instance_iou(a, b)});
      }
    }
    const auto got = overlapping_pairs(p, g);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].pred_id, expected[k].pred_id);
      EXPECT_EQ(got[k].gt_id, expected[k].gt_id);
      EXPECT_NEAR(got[k].iou, expected[k].iou, 1e-12);
    }
  }
}

// Every one-to-one matching over eligible pairs; returns the best TP count
// and the set of matchings that attain it.
std::pair<std::size_t, std::vector<std::set<std::pair<std::uint32_t, std::uint32_t>>>>
brute_force_matchings(const std::vector<MatchPair>& eligible) {
  std::size_t best = 0;
  std::vector<std::set<std::pair<std::uint32_t, std::uint32_t>>> argbest;
  std::set<std::pair<std::uint32_t, std::uint32_t>> cur;
  std::set<std::uint32_t> used_p, used_g;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == eligible.size()) {
      if (cur.size() > best) {
        best = cur.size();
        argbest.clear();
      }
      if (cur.size() == best) argbest.push_back(cur);
      return;
    }
    rec(k + 1);
    const MatchPair& e = eligible[k];
    if (used_p.count(e.pred_id) || used_g.count(e.gt_id)) return;
    used_p.insert(e.pred_id);
    used_g.insert(e.gt_id);
    cur.insert({e.pred_id, e.gt_id});
    rec(k + 1);
    cur.erase({e.pred_id, e.gt_id});
    used_p.erase(e.pred_id);
    used_g.erase(e.gt_id);
  };
  rec(0);
  return {best, argbest};
}

TEST(Match, AgreesWithBruteForceOnRandomScenes) {
  std::mt19937_64 rng(77);
  int unique_checked = 0;
  for (int t = 0; t < 300; ++t) {
    std::vector<std::array<std::size_t, 4>> gr, pr;
    const std::size_t n = 1 + rng() % 6;
    for (std::size_t k = 0; k < n; ++k) {
      const std::array<std::size_t, 4> g{rng() % 28, rng() % 28, 3 + rng() % 8, 3 + rng() % 8};
      gr.push_back(g);
      if (rng() % 4 != 0) {
        pr.push_back({g[0] + rng() % 3, g[1] + rng() % 3, g[2] + rng() % 3 - 1, g[3]});
      }
    }
    const InstanceMap g = rect_instances(36, 36, gr), p = rect_instances(36, 36, pr);
    std::vector<MatchPair> eligible;
    for (const auto& mp : overlapping_pairs(p, g)) {
      if (mp.iou >= 0.5) eligible.push_back(mp);
    }
    const MatchResult m = match_instances(p, g, 0.5);
    const auto [best, argbest] = brute_force_matchings(eligible);
    EXPECT_EQ(m.counts.tp, best);
    EXPECT_EQ(m.counts.fp, p.max_label - best);
    EXPECT_EQ(m.counts.fn, g.max_label - best);
    std::set<double> ious;
    for (const auto& e : eligible) ious.insert(e.iou);
    if (argbest.size() == 1 && ious.size() == eligible.size()) {
      std::set<std::pair<std::uint32_t, std::uint32_t>> got;
      for (const auto& mp : m.pairs) got.insert({mp.pred_id, mp.gt_id});
      EXPECT_EQ(got, argbest.front());
      ++unique_checked;
    }
    for (const auto& mp : m.pairs) EXPECT_GE(mp.iou, 0.5);
  }
  EXPECT_GT(unique_checked, 200);
}

TEST(F1, ReferenceCounts) {
  EXPECT_NEAR(f1_from_counts({711, 400, 1009}), 50.23, 0.005);
  EXPECT_NEAR(f1_from_counts({711, 400, 1009}), 50.22, 0.02);
  EXPECT_NEAR(f1_from_counts({1100, 506, 620}), 66.15, 0.005);
  EXPECT_NEAR(f1_from_counts({1100, 506, 620}), 66.14, 0.02);
  EXPECT_EQ(f1_from_counts({0, 0, 0}), 100.0);
  EXPECT_EQ(f1_from_counts({0, 3, 0}), 0.0);
}

TEST(Aggregate, GlobalSumNotMeanOfRatios) {
  const ImageCounts one{"a", {3, 1, 2}};
  EXPECT_EQ(aggregate_global({one}).counts, one.counts);
  EXPECT_EQ(aggregate_global({one}).f1_percent, f1_from_counts(one.counts));
  const GlobalScore g = aggregate_global({{"x", {1, 0, 0}}, {"y", {0, 1, 1}}});
  EXPECT_EQ(g.counts, (EvalCounts{1, 1, 1}));
  EXPECT_DOUBLE_EQ(g.f1_percent, 50.0);
  // That pair averages to 50 by coincidence; this one does not.
  const GlobalScore h = aggregate_global({{"x", {10, 0, 0}}, {"y", {0, 1, 1}}});
  EXPECT_NEAR(h.f1_percent, 2000.0 / 22.0, 1e-12);
  EXPECT_NE(h.f1_percent, (f1_from_counts({10, 0, 0}) + f1_from_counts({0, 1, 1})) / 2.0);
  const GlobalScore t = aggregate_global({{"a", {700, 390, 1000}}, {"b", {11, 10, 9}}});
  EXPECT_EQ(t.counts, (EvalCounts{711, 400, 1009}));
  EXPECT_NEAR(t.f1_percent, 50.23, 0.005);
}

using Rgb = std::array<std::uint8_t, 3>;
constexpr Rgb kBlack{0, 0, 0}, kRed{255, 0, 0}, kGreen{0, 255, 0}, kBlue{0, 0, 255},
    kCyan{0, 255, 255};

TEST(ColorMap, PerfectEmptyAndCyanScenes) {
  const InstanceMap gt = rect_instances(20, 20, {{2, 2, 6, 6}, {10, 10, 6, 6}});
  RgbImage img = color_map(gt, gt, match_instances(gt, gt));
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    EXPECT_EQ(img.pixels[i], gt.labels[i] ? kRed : kBlack);
  }
  const InstanceMap none = rect_instances(20, 20, {});
  img = color_map(none, gt, match_instances(none, gt));
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    EXPECT_EQ(img.pixels[i], gt.labels[i] ? kBlue : kBlack);
  }
  // FP prediction shifted far enough to miss the threshold.
  const InstanceMap g1 = rect_instances(20, 20, {{5, 2, 8, 8}});
  const InstanceMap p1 = rect_instances(20, 20, {{5, 8, 8, 8}});
  img = color_map(p1, g1, match_instances(p1, g1));
  EXPECT_EQ(img.pixels(6, 3), kBlue);
  EXPECT_EQ(img.pixels(6, 9), kCyan);
  EXPECT_EQ(img.pixels(6, 15), kGreen);
  EXPECT_EQ(img.pixels(0, 0), kBlack);
}

TEST(ColorMap, RejectsInconsistentMatch) {
  const InstanceMap gt = rect_instances(10, 10, {{1, 1, 4, 4}});
  MatchResult m = match_instances(gt, gt);
  m.unmatched_pred.push_back(1);
  EXPECT_THROW(color_map(gt, gt, m), ValidationError);
  m = match_instances(gt, gt);
  m.pairs.clear();
  EXPECT_THROW(color_map(gt, gt, m), ValidationError);
}

TEST(ColorMap, NeverYellowAndChannelsFollowSets) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 60; ++t) {
    std::vector<std::array<std::size_t, 4>> gr, pr;
    for (int k = 0; k < 5; ++k) {
      gr.push_back({rng() % 24, rng() % 24, 3 + rng() % 6, 3 + rng() % 6});
      pr.push_back({rng() % 24, rng() % 24, 3 + rng() % 6, 3 + rng() % 6});
    }
    const InstanceMap g = rect_instances(30, 30, gr), p = rect_instances(30, 30, pr);
    const MatchResult m = match_instances(p, g);
    const RgbImage img = color_map(p, g, m);
    std::set<std::uint32_t> fp(m.unmatched_pred.begin(), m.unmatched_pred.end());
    std::set<std::uint32_t> fn(m.unmatched_gt.begin(), m.unmatched_gt.end());
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
      const Rgb px = img.pixels[i];
      EXPECT_FALSE(px[0] && px[1]);
      EXPECT_EQ(px[0] != 0, p.labels[i] != 0 && !fp.count(p.labels[i]));
      EXPECT_EQ(px[1] != 0, p.labels[i] != 0 && fp.count(p.labels[i]) != 0);
      EXPECT_EQ(px[2] != 0, g.labels[i] != 0 && fn.count(g.labels[i]) != 0);
    }
  }
}

TEST(Csv, ExportAndRoundTrip) {
  EXPECT_EQ(export_per_image_csv({}), "image_id,tp,fp,fn\n");
  EXPECT_EQ(export_per_image_csv({{"a", {3, 1, 2}}}), "image_id,tp,fp,fn\na,3,1,2\n");
  const std::vector<ImageCounts> rows{{"tile_0001", {5, 0, 7}}, {"with,comma", {1, 2, 3}},
                                      {"quote\"d", {0, 0, 0}}, {"z", {18446744073709551615ull, 1, 1}}};
  EXPECT_EQ(parse_per_image_csv(export_per_image_csv(rows)), rows);
  EXPECT_THROW(parse_per_image_csv("image_id,tp,fp\n"), ValidationError);
  EXPECT_THROW(parse_per_image_csv("image_id,tp,fp,fn\na,1,x,2\n"), ValidationError);
}

}  // namespace
}  // namespace footprint
