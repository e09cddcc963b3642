#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "footprint/geometry.hpp"
#include "footprint/raster.hpp"

namespace footprint {

struct TileRecord {
  std::uint32_t tile_id = 0;  // row-major grid index
  std::size_t row = 0;        // pixel origin in the source raster
  std::size_t col = 0;
  std::size_t size = 0;
  bool blank = false;
  std::optional<std::uint32_t> fold;
  bool operator==(const TileRecord&) const = default;
};

using BlankProbe = std::function<bool(const TileRecord&)>;

/// Non-overlapping grid of full tiles; partial edge tiles are dropped.
std::vector<TileRecord> tile_index(std::size_t source_height, std::size_t source_width,
                                   std::size_t tile_size, const BlankProbe& probe);

/// Probe reporting a tile blank when every sample in it, on every channel,
/// equals `nodata`.
BlankProbe nodata_probe(const Planes& source, float nodata);

/// Copies a window out of a raster stack.
Planes crop_planes(const Planes& source, std::size_t row, std::size_t col, std::size_t height,
                   std::size_t width);

/// Clips a ring to the axis-aligned window [x0,x1] x [y0,y1].
PolygonRing clip_ring(const PolygonRing& ring, double x0, double y0, double x1, double y1);

struct TileCrop {
  std::size_t row = 0;
  std::size_t col = 0;
  Planes image;
  std::vector<PolygonRing> rings;  // in crop-local coordinates
};

/// Splits a (2*crop_size)^2 tile into its four quadrants at offsets (0,0),
/// (0,c), (c,0), (c,c). Rings are clipped to each quadrant and translated;
/// fragments that fill no pixel are dropped.
std::array<TileCrop, 4> subdivide_tile(const Planes& tile, const std::vector<PolygonRing>& rings,
                                       std::size_t crop_size = 512);

/// Round-robin folds over non-blank tiles sorted by pixel origin (row, col).
/// Blank tiles are left unassigned. Input order does not matter.
std::vector<TileRecord> kfold_assign(std::vector<TileRecord> tiles, std::uint32_t k = 5);

std::string tile_index_to_json(const std::vector<TileRecord>& tiles);
std::vector<TileRecord> tile_index_from_json(const std::string& text);

}  // namespace footprint
