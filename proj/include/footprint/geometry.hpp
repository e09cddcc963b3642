#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace footprint {

/// Pixel-space point: x rightward, y downward, origin at the top-left corner.
struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Closed ring; the last vertex connects back to the first.
struct PolygonRing {
  std::vector<Point> vertices;
  bool operator==(const PolygonRing&) const = default;
};

/// Shoelace area with y pointing down; positive for rings that run
/// counter-clockwise in image coordinates (east along the top edge first).
double signed_area(const PolygonRing& ring);

struct PolygonInstance {
  std::uint32_t id = 0;
  PolygonRing exterior;  // integer pixel-corner coordinates
  std::size_t area_px = 0;
  bool operator==(const PolygonInstance&) const = default;
};

struct PolygonSet {
  std::string image_id;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<PolygonInstance> instances;
  bool operator==(const PolygonSet&) const = default;
};

}  // namespace footprint
