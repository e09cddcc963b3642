#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "footprint/geometry.hpp"
#include "footprint/raster.hpp"

namespace footprint {

/// Raised for a malformed annotation document or an invalid polygon.
/// `polygon_index` is -1 for document-level failures.
class AnnotationError : public ValidationError {
 public:
  AnnotationError(std::string image_id, long polygon_index, const std::string& message)
      : ValidationError(format(image_id, polygon_index, message)),
        image_id_(std::move(image_id)),
        polygon_index_(polygon_index) {}

  const std::string& image_id() const { return image_id_; }
  long polygon_index() const { return polygon_index_; }

 private:
  static std::string format(const std::string& id, long index, const std::string& message) {
    if (index < 0) return "annotations: " + message;
    return "annotations: image '" + id + "' polygon " + std::to_string(index) + ": " + message;
  }
  std::string image_id_;
  long polygon_index_;
};

struct ImageAnnotations {
  std::string image_id;
  std::vector<PolygonRing> rings;
  bool operator==(const ImageAnnotations&) const = default;
};

/// Parses either
///   {"<image id>": [{"points": [[x, y], ...]}, ...], ...}
/// or a GeoJSON FeatureCollection of Polygon features in pixel coordinates
/// (exterior ring only; `properties.image_id` selects the image, otherwise
/// `default_image_id`). Images keep document order.
std::vector<ImageAnnotations> ingest_annotations(std::string_view document,
                                                 std::string_view default_image_id = "image");

/// GeoJSON FeatureCollection with Polygon features (properties `id`,
/// `area_px`) plus top-level `image_id`, `height` and `width` members.
std::string polygon_set_to_geojson(const PolygonSet& set);

/// Reads a FeatureCollection written by polygon_set_to_geojson, or any
/// Polygon FeatureCollection; `height`/`width` are 0 when absent.
PolygonSet polygon_set_from_geojson(std::string_view document,
                                    std::string_view default_image_id = "image");

/// Rasterizes rings into instance labels in ring order. A pixel claimed by
/// an earlier ring stays with it; rings left without pixels are dropped and
/// the remaining labels are dense.
InstanceMap rings_to_instance_map(const std::vector<PolygonRing>& rings, std::size_t height,
                                  std::size_t width);

}  // namespace footprint
