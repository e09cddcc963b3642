#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "footprint/annotations.hpp"
#include "footprint/dataset.hpp"
#include "footprint/targets.hpp"
#include "test_support.hpp"

namespace footprint {
namespace {

const BlankProbe kNeverBlank = [](const TileRecord&) { return false; };

PolygonRing rect(double x0, double y0, double x1, double y1) {
  return {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

TEST(TileIndex, GridCounts) {
  const auto t = tile_index(4096, 4096, 1024, kNeverBlank);
  ASSERT_EQ(t.size(), 16u);
  EXPECT_EQ(tile_index(4500, 4096, 1024, kNeverBlank).size(), 16u);
  EXPECT_EQ(t[5].tile_id, 5u);
  EXPECT_EQ(t[5].row, 1024u);
  EXPECT_EQ(t[5].col, 1024u);
  EXPECT_THROW(tile_index(10, 10, 0, kNeverBlank), ValidationError);
}

TEST(TileIndex, PartitionOfSource) {
  const auto t = tile_index(70, 50, 16, kNeverBlank);
  BinaryMask cover(70, 50);
  for (const auto& r : t) {
    ASSERT_LE(r.row + r.size, 70u);
    ASSERT_LE(r.col + r.size, 50u);
    for (std::size_t y = r.row; y < r.row + r.size; ++y) {
      for (std::size_t x = r.col; x < r.col + r.size; ++x) {
        EXPECT_EQ(cover(y, x), 0);
        cover(y, x) = 1;
      }
    }
  }
  EXPECT_EQ(count_set(cover), 64u * 48u);
}

TEST(TileIndex, NodataProbe) {
  Planes src(2, 8, 8, 0.0f);
  auto t = tile_index(8, 8, 4, nodata_probe(src, 0.0f));
  EXPECT_TRUE(std::all_of(t.begin(), t.end(), [](const TileRecord& r) { return r.blank; }));
  src.at(1, 6, 1) = 0.5f;  // second channel only, bottom-left tile
  t = tile_index(8, 8, 4, nodata_probe(src, 0.0f));
  EXPECT_EQ(std::count_if(t.begin(), t.end(), [](const TileRecord& r) { return !r.blank; }), 1);
  EXPECT_FALSE(t[2].blank);
  const Planes crop = crop_planes(src, 4, 0, 4, 4);
  EXPECT_EQ(crop.at(1, 2, 1), 0.5f);
  EXPECT_THROW(crop_planes(src, 5, 0, 4, 4), ValidationError);
}

TEST(Subdivide, TranslatesIntoOwningQuadrant) {
  const Planes tile(1, 1024, 1024, 0.5f);
  const auto crops = subdivide_tile(tile, {rect(600, 600, 620, 620), rect(10, 10, 40, 30)});
  EXPECT_EQ(crops[0].rings.size(), 1u);
  EXPECT_EQ(crops[0].rings[0], rect(10, 10, 40, 30));
  EXPECT_TRUE(crops[1].rings.empty());
  EXPECT_TRUE(crops[2].rings.empty());
  ASSERT_EQ(crops[3].rings.size(), 1u);
  EXPECT_EQ(crops[3].row, 512u);
  EXPECT_EQ(crops[3].col, 512u);
  EXPECT_EQ(rasterize_polygon(crops[3].rings[0], 512, 512),
            rasterize_polygon(rect(88, 88, 108, 108), 512, 512));
  EXPECT_EQ(crops[1].col, 512u);
  EXPECT_EQ(crops[1].row, 0u);
  EXPECT_EQ(crops[1].image.height(), 512u);
  EXPECT_THROW(subdivide_tile(Planes(1, 1000, 1024), {}), ValidationError);
}

TEST(Subdivide, StraddlingPolygonConservesArea) {
  const Planes tile(1, 1024, 1024);
  const PolygonRing ring{{{500.3, 100.2}, {530.6, 90.1}, {540.2, 140.7}, {495.5, 150.9}}};
  const auto crops = subdivide_tile(tile, {ring});
  EXPECT_EQ(crops[0].rings.size(), 1u);
  EXPECT_EQ(crops[1].rings.size(), 1u);
  const std::size_t parts = count_set(rasterize_polygon(crops[0].rings[0], 512, 512)) +
                            count_set(rasterize_polygon(crops[1].rings[0], 512, 512));
  EXPECT_EQ(parts, count_set(rasterize_polygon(ring, 1024, 1024)));
}

TEST(Subdivide, RandomRingsConserveArea) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> c(380.0, 640.0), d(-60.0, 60.0);
  const Planes tile(1, 1024, 1024);
  for (int trial = 0; trial < 30; ++trial) {
    const double cx = c(rng), cy = c(rng);
    PolygonRing r;
    for (int k = 0; k < 6; ++k) {
      const double a = k * 3.14159265358979 / 3.0;
      const double rad = 20.0 + std::abs(d(rng));
      r.vertices.push_back({cx + rad * std::cos(a), cy + rad * std::sin(a)});
    }
    const auto crops = subdivide_tile(tile, {r});
    std::size_t total = 0;
    for (const auto& crop : crops) {
      for (const auto& ring : crop.rings) total += count_set(rasterize_polygon(ring, 512, 512));
    }
    EXPECT_EQ(total, count_set(rasterize_polygon(r, 1024, 1024))) << "trial " << trial;
  }
}

TEST(ClipRing, InsideUnchangedOutsideEmpty) {
  const PolygonRing r = rect(2, 2, 6, 5);
  EXPECT_EQ(clip_ring(r, 0, 0, 10, 10), r);
  EXPECT_TRUE(clip_ring(r, 7, 0, 10, 10).vertices.size() < 3 ||
              signed_area(clip_ring(r, 7, 0, 10, 10)) == 0.0);
  EXPECT_DOUBLE_EQ(signed_area(clip_ring(r, 4, 0, 10, 10)), 2.0 * 3.0);
}

std::vector<TileRecord> grid(std::size_t rows, std::size_t cols) {
  return tile_index(rows * 4, cols * 4, 4, kNeverBlank);
}

std::vector<std::uint32_t> folds(const std::vector<TileRecord>& t) {
  std::vector<std::uint32_t> out;
  for (const auto& r : t) out.push_back(r.fold.value());
  return out;
}

TEST(KFold, RoundRobinExamples) {
  EXPECT_EQ(folds(kfold_assign(grid(1, 10), 5)),
            (std::vector<std::uint32_t>{0, 1, 2, 3, 4, 0, 1, 2, 3, 4}));
  std::map<std::uint32_t, int> sizes;
  for (const auto f : folds(kfold_assign(grid(1, 3), 2))) ++sizes[f];
  EXPECT_EQ(sizes[0], 2);
  EXPECT_EQ(sizes[1], 1);
  EXPECT_THROW(kfold_assign(grid(1, 3), 4), ValidationError);
  EXPECT_THROW(kfold_assign(grid(1, 3), 1), ValidationError);
}

TEST(KFold, SizesFor1352Tiles) {
  const auto assigned = kfold_assign(grid(26, 52), 5);
  std::map<std::uint32_t, int> sizes;
  for (const auto f : folds(assigned)) ++sizes[f];
  EXPECT_EQ(sizes, (std::map<std::uint32_t, int>{{0, 271}, {1, 271}, {2, 270}, {3, 270}, {4, 270}}));
}

TEST(KFold, PermutationInvariantAndSkipsBlank) {
  auto tiles = grid(5, 7);
  for (std::size_t i = 0; i < tiles.size(); i += 4) tiles[i].blank = true;
  const auto ref = kfold_assign(tiles, 3);
  std::map<std::uint32_t, std::optional<std::uint32_t>> by_id;
  for (const auto& r : ref) by_id[r.tile_id] = r.fold;
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(tiles.begin(), tiles.end(), rng);
    for (const auto& r : kfold_assign(tiles, 3)) EXPECT_EQ(r.fold, by_id[r.tile_id]);
  }
  for (const auto& r : ref) EXPECT_EQ(r.blank, !r.fold.has_value());
}

TEST(TileIndexJson, RoundTrip) {
  auto tiles = kfold_assign(grid(2, 3), 2);
  tiles[1].blank = true;
  tiles[1].fold.reset();
  const std::string text = tile_index_to_json(tiles);
  EXPECT_NE(text.find("\"fold\": null"), std::string::npos);
  EXPECT_EQ(tile_index_from_json(text), tiles);
  EXPECT_THROW(tile_index_from_json("{\"tile_id\":1}"), ValidationError);
}

TEST(Annotations, IngestExamples) {
  const auto one = ingest_annotations(R"({"img1": [{"points": [[0,0],[4,0],[4,4],[0,4]]}]})");
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].image_id, "img1");
  ASSERT_EQ(one[0].rings.size(), 1u);
  EXPECT_EQ(one[0].rings[0], rect(0, 0, 4, 4));
  EXPECT_TRUE(ingest_annotations("{}").empty());
  try {
    ingest_annotations(R"({"a": [{"points": [[0,0],[4,0]]}]})");
    FAIL() << "expected AnnotationError";
  } catch (const AnnotationError& e) {
    EXPECT_EQ(e.image_id(), "a");
    EXPECT_EQ(e.polygon_index(), 0);
  }
}

TEST(Annotations, RejectsMalformedDocuments) {
  EXPECT_THROW(ingest_annotations("{\"a\": [{\"points\": [[0,0],[4,0],[4"), AnnotationError);
  EXPECT_THROW(ingest_annotations("[1,2]"), AnnotationError);
  EXPECT_THROW(ingest_annotations(R"({"a": [{"pts": []}]})"), AnnotationError);
  try {
    ingest_annotations(R"({"a": [{"points": [[0,0],[4,0],[4,4]]}, {"points": [[0,0],[-4,0],[4,4]]}]})");
    FAIL() << "expected AnnotationError";
  } catch (const AnnotationError& e) {
    EXPECT_EQ(e.polygon_index(), 1);
  }
}

TEST(Annotations, GeoJsonInput) {
  const auto got = ingest_annotations(R"({"type": "FeatureCollection", "features": [
    {"type": "Feature", "properties": {"image_id": "t7"},
     "geometry": {"type": "Polygon", "coordinates": [[[0,0],[4,0],[4,4],[0,4],[0,0]]]}},
    {"type": "Feature", "properties": {},
     "geometry": {"type": "Polygon", "coordinates": [[[1,1],[3,1],[3,3],[1,1]]]}}]})",
                                      "fallback");
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].image_id, "t7");
  EXPECT_EQ(got[0].rings[0], rect(0, 0, 4, 4));
  EXPECT_EQ(got[1].image_id, "fallback");
  EXPECT_EQ(got[1].rings[0].vertices.size(), 3u);
}

TEST(Annotations, PolygonSetGeoJsonRoundTrip) {
  PolygonSet set{"scene", 40, 30, {}};
  set.instances.push_back({1, rect(0, 0, 2, 2), 4});
  set.instances.push_back({2, {{{5, 5}, {9, 5}, {9, 7}, {7, 7}, {7, 9}, {5, 9}}}, 12});
  const std::string text = polygon_set_to_geojson(set);
  EXPECT_EQ(polygon_set_from_geojson(text), set);
  EXPECT_EQ(polygon_set_to_geojson(polygon_set_from_geojson(text)), text);
}

TEST(Annotations, RingsToInstanceMap) {
  const InstanceMap m =
      rings_to_instance_map({rect(0, 0, 4, 4), rect(2, 2, 6, 6), rect(1, 1, 3, 3)}, 8, 8);
  EXPECT_EQ(m.max_label, 2u);
  EXPECT_EQ(m.labels(3, 3), 1u);
  EXPECT_EQ(m.labels(4, 4), 2u);
  EXPECT_EQ(count_set(instance_support(m, 2)), 16u - 4u);
}

}  // namespace
}  // namespace footprint
