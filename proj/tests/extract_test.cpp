#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "footprint/components.hpp"
#include "footprint/extract.hpp"
#include "footprint/fusion.hpp"
#include "footprint/targets.hpp"
#include "test_support.hpp"

namespace footprint {
namespace {

InstanceMap labels_of(std::size_t h, std::size_t w, std::vector<std::uint32_t> v) {
  const std::uint32_t mx = v.empty() ? 0 : *std::max_element(v.begin(), v.end());
  return {Raster<std::uint32_t>(h, w, std::move(v)), mx};
}

TEST(Seeds, BorderSubtraction) {
  const BinaryMask b = testing::block(14, 14, 2, 2, 10, 10);
  const BinaryMask border = mask_xor(b, testing::block(14, 14, 4, 4, 6, 6));
  const InstanceMap s = make_seeds(b, border);
  EXPECT_EQ(s.max_label, 1u);
  EXPECT_EQ(count_set(instance_support(s, 1)), 36u);
  EXPECT_EQ(make_seeds(b, BinaryMask(14, 14)), connected_components(b));
  EXPECT_EQ(make_seeds(b, b).max_label, 0u);
  EXPECT_THROW(make_seeds(b, BinaryMask(14, 13)), ValidationError);
}

TEST(Watershed, RowTieGoesToSmallerLabel) {
  const InstanceMap seeds = labels_of(1, 5, {1, 0, 0, 0, 2});
  const InstanceMap out = watershed_assign(seeds, BinaryMask(1, 5, std::uint8_t{1}));
  EXPECT_EQ(out, labels_of(1, 5, {1, 1, 1, 2, 2}));
}

TEST(Watershed, BlobsAndSeedlessComponent) {
  BinaryMask region = testing::block(6, 12, 0, 0, 3, 3);
  testing::paint(region, 0, 5, 3, 3);
  testing::paint(region, 4, 9, 2, 3);
  InstanceMap seeds{Raster<std::uint32_t>(6, 12, 0u), 2};
  seeds.labels(1, 6) = 1;
  seeds.labels(2, 2) = 2;
  const InstanceMap out = watershed_assign(seeds, region);
  EXPECT_EQ(out.max_label, 3u);
  EXPECT_EQ(instance_support(out, 2), testing::block(6, 12, 0, 0, 3, 3));
  EXPECT_EQ(instance_support(out, 1), testing::block(6, 12, 0, 5, 3, 3));
  EXPECT_EQ(instance_support(out, 3), testing::block(6, 12, 4, 9, 2, 3));
}

TEST(Watershed, SeedOutsideRegionThrows) {
  InstanceMap seeds{Raster<std::uint32_t>(3, 3, 0u), 1};
  seeds.labels(0, 0) = 1;
  EXPECT_THROW(watershed_assign(seeds, testing::block(3, 3, 1, 1, 2, 2)), ValidationError);
}

TEST(Watershed, MatchesBfsOracleOnRandomScenes) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t h = 4 + rng() % 30, w = 4 + rng() % 30;
    const BinaryMask region = testing::random_mask(rng, h, w, 0.55 + 0.1 * (trial % 4));
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < region.size(); ++i) {
      if (region[i]) inside.push_back(i);
    }
    if (inside.empty()) continue;
    const std::uint32_t nseeds = static_cast<std::uint32_t>(rng() % 7);
    InstanceMap seeds{Raster<std::uint32_t>(h, w, 0u), nseeds};
    for (std::uint32_t s = 1; s <= nseeds; ++s) {
      seeds.labels[inside[rng() % inside.size()]] = s;
    }
    // Overwrites may drop a label; keep them dense for the precondition.
    std::vector<std::uint32_t> present;
    for (const auto v : seeds.labels.values()) {
      if (v) present.push_back(v);
    }
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    for (auto& v : seeds.labels.values()) {
      if (v) v = static_cast<std::uint32_t>(
                 std::lower_bound(present.begin(), present.end(), v) - present.begin() + 1);
    }
    seeds.max_label = static_cast<std::uint32_t>(present.size());

    const InstanceMap out = watershed_assign(seeds, region);
    EXPECT_EQ(out, testing::watershed_oracle(seeds, region)) << "trial " << trial;
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
      EXPECT_EQ(out.labels[i] != 0, region[i] != 0);
      if (seeds.labels[i]) EXPECT_EQ(out.labels[i], seeds.labels[i]);
    }
  }
}

TEST(FilterSmall, StrictThresholdAndRelabel) {
  BinaryMask m(40, 40);
  for (std::size_t i = 0; i < 139; ++i) m[i] = 1;                   // rows 0-3
  for (std::size_t i = 0; i < 140; ++i) m[40 * 10 + i] = 1;         // rows 10-13
  const InstanceMap cc = connected_components(m);
  ASSERT_EQ(cc.max_label, 2u);
  const InstanceMap kept = filter_small(cc);
  EXPECT_EQ(kept.max_label, 1u);
  EXPECT_EQ(count_set(instance_support(kept, 1)), 140u);
  EXPECT_EQ(kept.labels(10, 0), 1u);
  EXPECT_EQ(filter_small(cc, 139).max_label, 2u);
  const InstanceMap empty{Raster<std::uint32_t>(3, 3, 0u), 0};
  EXPECT_EQ(filter_small(empty), empty);
}

TEST(Polygonize, TwoByTwoBlock) {
  const PolygonSet ps = polygonize(connected_components(testing::block(4, 4, 0, 0, 2, 2)));
  ASSERT_EQ(ps.instances.size(), 1u);
  EXPECT_EQ(ps.instances[0].id, 1u);
  EXPECT_EQ(ps.instances[0].area_px, 4u);
  EXPECT_EQ(ps.instances[0].exterior.vertices,
            (std::vector<Point>{{0, 0}, {2, 0}, {2, 2}, {0, 2}}));
}

TEST(Polygonize, LPentomino) {
  BinaryMask m = testing::block(5, 5, 0, 0, 4, 1);
  m(3, 1) = 1;
  const PolygonSet ps = polygonize(connected_components(m));
  ASSERT_EQ(ps.instances.size(), 1u);
  EXPECT_EQ(ps.instances[0].area_px, 5u);
  EXPECT_EQ(ps.instances[0].exterior.vertices,
            (std::vector<Point>{{0, 0}, {1, 0}, {1, 3}, {2, 3}, {2, 4}, {0, 4}}));
  EXPECT_DOUBLE_EQ(signed_area(ps.instances[0].exterior), 5.0);
}

TEST(Polygonize, EmptyMap) {
  EXPECT_TRUE(polygonize(InstanceMap{Raster<std::uint32_t>(3, 3, 0u), 0}).instances.empty());
}

// Label set plus the background pockets it encloses (background moves are
// 4-connected, dual to the 8-connected label).
BinaryMask filled_oracle(const BinaryMask& s) {
  const std::size_t h = s.height() + 2, w = s.width() + 2;
  BinaryMask outside(h, w);
  std::vector<std::size_t> stack{0};
  outside[0] = 1;
  auto sv = [&](std::size_t y, std::size_t x) {
    return y > 0 && x > 0 && y <= s.height() && x <= s.width() && s(y - 1, x - 1);
  };
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    const std::size_t y = p / w, x = p % w;
    const std::ptrdiff_t nb[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    for (const auto& d : nb) {
      const auto yy = static_cast<std::ptrdiff_t>(y) + d[0];
      const auto xx = static_cast<std::ptrdiff_t>(x) + d[1];
      if (!testing::in_canvas(yy, xx, h, w)) continue;
      const std::size_t q = static_cast<std::size_t>(yy) * w + static_cast<std::size_t>(xx);
      if (outside[q] || sv(static_cast<std::size_t>(yy), static_cast<std::size_t>(xx))) continue;
      outside[q] = 1;
      stack.push_back(q);
    }
  }
  BinaryMask out(s.height(), s.width());
  for (std::size_t y = 0; y < s.height(); ++y) {
    for (std::size_t x = 0; x < s.width(); ++x) out(y, x) = outside(y + 1, x + 1) ? 0 : 1;
  }
  return out;
}

TEST(Polygonize, RingsEncloseExactlyTheirComponents) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t h = 3 + rng() % 18, w = 3 + rng() % 18;
    const InstanceMap cc = connected_components(testing::random_mask(rng, h, w, 0.5));
    const PolygonSet ps = polygonize(cc);
    ASSERT_EQ(ps.instances.size(), cc.max_label);
    EXPECT_EQ(ps.height, h);
    EXPECT_EQ(ps.width, w);
    std::size_t area_sum = 0;
    for (const PolygonInstance& inst : ps.instances) {
      const BinaryMask support = instance_support(cc, inst.id);
      const BinaryMask filled = filled_oracle(support);
      area_sum += inst.area_px;
      EXPECT_EQ(inst.area_px, count_set(support));
      EXPECT_DOUBLE_EQ(signed_area(inst.exterior), static_cast<double>(count_set(filled)));
      EXPECT_EQ(rasterize_polygon(inst.exterior, h, w), filled) << "trial " << trial;
      const auto& v = inst.exterior.vertices;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        const Point& c = v[(i + 2) % v.size()];
        EXPECT_TRUE(a.x == b.x || a.y == b.y);            // rectilinear
        EXPECT_FALSE((a.x == b.x) == (b.x == c.x));        // corners only
      }
    }
    EXPECT_EQ(area_sum, cc.labels.size() - static_cast<std::size_t>(std::count(
                            cc.labels.values().begin(), cc.labels.values().end(), 0u)));
  }
}

PolygonRing square(double x, double y, double side) {
  return {{{x, y}, {x + side, y}, {x + side, y + side}, {x, y + side}}};
}

Planes stack_planes(const std::vector<PolygonRing>& rings, std::size_t h, std::size_t w) {
  return targets_to_planes(assemble_targets(rings, h, w));
}

TEST(SingleClass, ConnectivityAndFilter) {
  BinaryMask apart = testing::block(20, 40, 2, 2, 12, 12);
  testing::paint(apart, 2, 15, 12, 12);
  EXPECT_EQ(extract_single_class(apart).instances.size(), 2u);
  BinaryMask touching = testing::block(20, 40, 2, 2, 12, 12);
  testing::paint(touching, 2, 14, 12, 12);
  EXPECT_EQ(extract_single_class(touching).instances.size(), 1u);
  EXPECT_TRUE(extract_single_class(testing::block(20, 40, 2, 2, 11, 12)).instances.empty());
}

TEST(MultiClass, EdgeSharingSquaresSeparate) {
  const std::vector<PolygonRing> rings = {square(4, 4, 16), square(20, 4, 16)};
  const Planes p = stack_planes(rings, 24, 40);
  const Extraction ex = extract_multi_class_full(p);
  ASSERT_EQ(ex.polygons.instances.size(), 2u);
  EXPECT_EQ(ex.polygons.instances[0].area_px, 256u);
  EXPECT_EQ(ex.polygons.instances[1].area_px, 256u);
  EXPECT_EQ(instance_support(ex.instances, 1), rasterize_polygon(rings[0], 24, 40));
  EXPECT_EQ(extract_single_class(binarize(p, 0)).instances.size(), 1u);
}

TEST(MultiClass, AllZeroAndMissingChannels) {
  EXPECT_TRUE(extract_multi_class(Planes(3, 8, 8, 0.0f)).instances.empty());
  EXPECT_THROW(extract_multi_class(Planes(1, 8, 8, 0.0f)), ValidationError);
}

TEST(MultiClass, OnePolygonPerGeneratedSquare) {
  std::vector<PolygonRing> rings;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rings.push_back(square(2 + 20.0 * c, 2 + 19.0 * r, 16));
  }
  const Planes p = stack_planes(rings, 64, 64);
  const PolygonSet ps = extract_multi_class(p);
  ASSERT_EQ(ps.instances.size(), rings.size());
  for (const PolygonInstance& inst : ps.instances) {
    EXPECT_EQ(inst.area_px, 256u);
  }
  MultiClassOptions no_spacing;
  no_spacing.use_spacing = false;
  EXPECT_EQ(extract_multi_class(p, no_spacing).instances.size(), rings.size());
}

}  // namespace
}  // namespace footprint
