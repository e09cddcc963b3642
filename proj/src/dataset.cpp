#include "footprint/dataset.hpp"

#include <algorithm>
#include <json.hpp>

#include "footprint/targets.hpp"

namespace footprint {

std::vector<TileRecord> tile_index(std::size_t source_height, std::size_t source_width,
                                   std::size_t tile_size, const BlankProbe& probe) {
  if (tile_size == 0) throw ValidationError("tile size must be >= 1");
  const std::size_t rows = source_height / tile_size;
  const std::size_t cols = source_width / tile_size;
  std::vector<TileRecord> tiles;
  tiles.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      TileRecord t;
      t.tile_id = static_cast<std::uint32_t>(r * cols + c);
      t.row = r * tile_size;
      t.col = c * tile_size;
      t.size = tile_size;
      t.blank = probe ? probe(t) : false;
      tiles.push_back(t);
    }
  }
  return tiles;
}

BlankProbe nodata_probe(const Planes& source, float nodata) {
  return [&source, nodata](const TileRecord& t) {
    for (std::size_t ch = 0; ch < source.channels(); ++ch) {
      for (std::size_t y = t.row; y < t.row + t.size; ++y) {
        for (std::size_t x = t.col; x < t.col + t.size; ++x) {
          if (source.at(ch, y, x) != nodata) return false;
        }
      }
    }
    return true;
  };
}

Planes crop_planes(const Planes& source, std::size_t row, std::size_t col, std::size_t height,
                   std::size_t width) {
  if (row + height > source.height() || col + width > source.width()) {
    throw ValidationError("crop window exceeds the source raster");
  }
  Planes out(source.channels(), height, width);
  for (std::size_t ch = 0; ch < source.channels(); ++ch) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) out.at(ch, y, x) = source.at(ch, row + y, col + x);
    }
  }
  return out;
}

PolygonRing clip_ring(const PolygonRing& ring, double x0, double y0, double x1, double y1) {
  // Sutherland-Hodgman against the four window half-planes.
  struct HalfPlane {
    int axis;  // 0 = x, 1 = y
    double bound;
    bool keep_above;
  };
  const HalfPlane planes[] = {{0, x0, true}, {0, x1, false}, {1, y0, true}, {1, y1, false}};
  std::vector<Point> current = ring.vertices;
  for (const HalfPlane& hp : planes) {
    if (current.empty()) break;
    const auto coord = [&](const Point& p) { return hp.axis == 0 ? p.x : p.y; };
    const auto inside = [&](const Point& p) {
      return hp.keep_above ? coord(p) >= hp.bound : coord(p) <= hp.bound;
    };
    const auto intersect = [&](const Point& a, const Point& b) {
      const double t = (hp.bound - coord(a)) / (coord(b) - coord(a));
      Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
      (hp.axis == 0 ? p.x : p.y) = hp.bound;
      return p;
    };
    std::vector<Point> next;
    for (std::size_t i = 0; i < current.size(); ++i) {
      const Point& a = current[i];
      const Point& b = current[(i + 1) % current.size()];
      const bool ina = inside(a);
      const bool inb = inside(b);
      if (ina) next.push_back(a);
      if (ina != inb) next.push_back(intersect(a, b));
    }
    current = std::move(next);
  }
  return PolygonRing{std::move(current)};
}

std::array<TileCrop, 4> subdivide_tile(const Planes& tile, const std::vector<PolygonRing>& rings,
                                       std::size_t crop_size) {
  if (crop_size == 0 || tile.height() != 2 * crop_size || tile.width() != 2 * crop_size) {
    throw ValidationError("subdivide_tile: expected a " + std::to_string(2 * crop_size) + "x" +
                          std::to_string(2 * crop_size) + " tile, got " +
                          std::to_string(tile.height()) + "x" + std::to_string(tile.width()));
  }
  std::array<TileCrop, 4> crops;
  const std::size_t offsets[4][2] = {{0, 0}, {0, crop_size}, {crop_size, 0}, {crop_size, crop_size}};
  for (std::size_t q = 0; q < 4; ++q) {
    TileCrop& crop = crops[q];
    crop.row = offsets[q][0];
    crop.col = offsets[q][1];
    crop.image = crop_planes(tile, crop.row, crop.col, crop_size, crop_size);
    const auto ox = static_cast<double>(crop.col);
    const auto oy = static_cast<double>(crop.row);
    const auto side = static_cast<double>(crop_size);
    for (const PolygonRing& ring : rings) {
      PolygonRing clipped = clip_ring(ring, ox, oy, ox + side, oy + side);
      if (clipped.vertices.size() < 3) continue;
      for (Point& p : clipped.vertices) {
        p.x -= ox;
        p.y -= oy;
      }
      if (count_set(rasterize_polygon(clipped, crop_size, crop_size)) == 0) continue;
      crop.rings.push_back(std::move(clipped));
    }
  }
  return crops;
}

std::vector<TileRecord> kfold_assign(std::vector<TileRecord> tiles, std::uint32_t k) {
  if (k < 2) throw ValidationError("kfold_assign: k must be >= 2");
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    tiles[i].fold.reset();
    if (!tiles[i].blank) order.push_back(i);
  }
  if (order.size() < k) {
    throw ValidationError("kfold_assign: " + std::to_string(order.size()) +
                          " non-blank tiles is fewer than k = " + std::to_string(k));
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const TileRecord& ta = tiles[a];
    const TileRecord& tb = tiles[b];
    if (ta.row != tb.row) return ta.row < tb.row;
    if (ta.col != tb.col) return ta.col < tb.col;
    return ta.tile_id < tb.tile_id;
  });
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    tiles[order[pos]].fold = static_cast<std::uint32_t>(pos % k);
  }
  return tiles;
}

std::string tile_index_to_json(const std::vector<TileRecord>& tiles) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const TileRecord& t : tiles) {
    nlohmann::ordered_json rec;
    rec["tile_id"] = t.tile_id;
    rec["row"] = t.row;
    rec["col"] = t.col;
    rec["size"] = t.size;
    rec["blank"] = t.blank;
    rec["fold"] = t.fold ? nlohmann::ordered_json(*t.fold) : nlohmann::ordered_json(nullptr);
    doc.push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

std::vector<TileRecord> tile_index_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("tile index: ") + e.what());
  }
  if (!doc.is_array()) throw ValidationError("tile index: top level must be an array");
  std::vector<TileRecord> tiles;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    try {
      TileRecord t;
      t.tile_id = rec.at("tile_id").get<std::uint32_t>();
      t.row = rec.at("row").get<std::size_t>();
      t.col = rec.at("col").get<std::size_t>();
      t.size = rec.value("size", std::size_t{0});
      t.blank = rec.at("blank").get<bool>();
      if (rec.contains("fold") && !rec["fold"].is_null()) t.fold = rec["fold"].get<std::uint32_t>();
      tiles.push_back(t);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("tile index record " + std::to_string(i) + ": " + e.what());
    }
  }
  return tiles;
}

}  // namespace footprint
