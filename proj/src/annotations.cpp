#include "footprint/annotations.hpp"

#include <cmath>
#include <json.hpp>

#include "footprint/targets.hpp"

namespace footprint {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse_document(std::string_view document) {
  try {
    return ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw AnnotationError("", -1, "parse error at byte " + std::to_string(e.byte) + ": " +
                                      e.what());
  }
}

PolygonRing parse_ring(const ordered_json& points, const std::string& image_id, long index,
                       bool drop_closing_vertex) {
  if (!points.is_array()) throw AnnotationError(image_id, index, "points must be an array");
  PolygonRing ring;
  for (const auto& pt : points) {
    if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
      throw AnnotationError(image_id, index, "each point must be an [x, y] number pair");
    }
    const Point p{pt[0].get<double>(), pt[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y < 0.0) {
      throw AnnotationError(image_id, index, "coordinate out of range");
    }
    ring.vertices.push_back(p);
  }
  if (drop_closing_vertex && ring.vertices.size() > 1 &&
      ring.vertices.front() == ring.vertices.back()) {
    ring.vertices.pop_back();
  }
  if (ring.vertices.size() < 3) {
    throw AnnotationError(image_id, index,
                          "ring has " + std::to_string(ring.vertices.size()) +
                              " points, at least 3 required");
  }
  return ring;
}

ImageAnnotations& slot_for(std::vector<ImageAnnotations>& images, const std::string& id) {
  for (auto& img : images) {
    if (img.image_id == id) return img;
  }
  images.push_back({id, {}});
  return images.back();
}

std::vector<ImageAnnotations> ingest_feature_collection(const ordered_json& doc,
                                                        std::string_view default_id) {
  std::vector<ImageAnnotations> images;
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw AnnotationError("", -1, "FeatureCollection without a features array");
  }
  const std::string fallback = doc.contains("image_id") && doc["image_id"].is_string()
                                   ? doc["image_id"].get<std::string>()
                                   : std::string(default_id);
  for (const auto& feature : doc["features"]) {
    std::string id = fallback;
    if (feature.contains("properties") && feature["properties"].is_object() &&
        feature["properties"].contains("image_id") &&
        feature["properties"]["image_id"].is_string()) {
      id = feature["properties"]["image_id"].get<std::string>();
    }
    ImageAnnotations& img = slot_for(images, id);
    const auto index = static_cast<long>(img.rings.size());
    const auto& geom = feature.contains("geometry") ? feature["geometry"] : ordered_json();
    if (!geom.is_object() || geom.value("type", "") != "Polygon" ||
        !geom.contains("coordinates") || !geom["coordinates"].is_array() ||
        geom["coordinates"].empty()) {
      throw AnnotationError(id, index, "feature geometry must be a Polygon");
    }
    img.rings.push_back(parse_ring(geom["coordinates"][0], id, index, true));
  }
  return images;
}

ordered_json coordinate(double v) {
  if (std::floor(v) == v && std::fabs(v) < 9e15) return static_cast<std::int64_t>(v);
  return v;
}

}  // namespace

std::vector<ImageAnnotations> ingest_annotations(std::string_view document,
                                                 std::string_view default_image_id) {
  const ordered_json doc = parse_document(document);
  if (!doc.is_object()) throw AnnotationError("", -1, "top level must be an object");
  if (doc.value("type", "") == "FeatureCollection") {
    return ingest_feature_collection(doc, default_image_id);
  }
  std::vector<ImageAnnotations> images;
  for (const auto& [id, polygons] : doc.items()) {
    if (!polygons.is_array()) {
      throw AnnotationError(id, -1, "image '" + id + "' must map to an array of polygons");
    }
    ImageAnnotations img{id, {}};
    for (std::size_t i = 0; i < polygons.size(); ++i) {
      const auto& poly = polygons[i];
      if (!poly.is_object() || !poly.contains("points")) {
        throw AnnotationError(id, static_cast<long>(i), "polygon must have a points field");
      }
      img.rings.push_back(parse_ring(poly["points"], id, static_cast<long>(i), false));
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::string polygon_set_to_geojson(const PolygonSet& set) {
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["image_id"] = set.image_id;
  doc["height"] = set.height;
  doc["width"] = set.width;
  doc["features"] = ordered_json::array();
  for (const PolygonInstance& inst : set.instances) {
    ordered_json ring = ordered_json::array();
    for (const Point& p : inst.exterior.vertices) {
      ring.push_back(ordered_json::array({coordinate(p.x), coordinate(p.y)}));
    }
    if (!inst.exterior.vertices.empty()) ring.push_back(ring.front());
    ordered_json feature;
    feature["type"] = "Feature";
    feature["properties"] = {{"id", inst.id}, {"area_px", inst.area_px}};
    feature["geometry"] = {{"type", "Polygon"}, {"coordinates", ordered_json::array({ring})}};
    doc["features"].push_back(std::move(feature));
  }
  return doc.dump() + "\n";
}

PolygonSet polygon_set_from_geojson(std::string_view document,
                                    std::string_view default_image_id) {
  const ordered_json doc = parse_document(document);
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw AnnotationError("", -1, "expected a GeoJSON FeatureCollection");
  }
  PolygonSet set;
  set.image_id = doc.contains("image_id") && doc["image_id"].is_string()
                     ? doc["image_id"].get<std::string>()
                     : std::string(default_image_id);
  set.height = doc.value("height", std::size_t{0});
  set.width = doc.value("width", std::size_t{0});
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw AnnotationError(set.image_id, -1, "FeatureCollection without a features array");
  }
  std::uint32_t next_id = 1;
  for (const auto& feature : doc["features"]) {
    const auto index = static_cast<long>(set.instances.size());
    const auto& geom = feature.contains("geometry") ? feature["geometry"] : ordered_json();
    if (!geom.is_object() || geom.value("type", "") != "Polygon" ||
        !geom.contains("coordinates") || !geom["coordinates"].is_array() ||
        geom["coordinates"].empty()) {
      throw AnnotationError(set.image_id, index, "feature geometry must be a Polygon");
    }
    PolygonInstance inst;
    inst.exterior = parse_ring(geom["coordinates"][0], set.image_id, index, true);
    inst.id = next_id++;
    if (feature.contains("properties") && feature["properties"].is_object()) {
      const auto& props = feature["properties"];
      inst.id = props.value("id", inst.id);
      inst.area_px = props.value("area_px", std::size_t{0});
    }
    set.instances.push_back(std::move(inst));
  }
  return set;
}

InstanceMap rings_to_instance_map(const std::vector<PolygonRing>& rings, std::size_t height,
                                  std::size_t width) {
  Raster<std::uint32_t> labels(height, width, 0u);
  for (std::size_t i = 0; i < rings.size(); ++i) {
    const BinaryMask fill = rasterize_polygon(rings[i], height, width);
    const auto id = static_cast<std::uint32_t>(i + 1);
    for (std::size_t p = 0; p < fill.size(); ++p) {
      if (fill[p] && labels[p] == 0) labels[p] = id;
    }
  }
  // Dense relabel in ring order (not anchor order) so ids follow the input.
  std::vector<std::uint32_t> remap(rings.size() + 1, 0);
  std::vector<bool> used(rings.size() + 1, false);
  for (const std::uint32_t id : labels.values()) used[id] = true;
  std::uint32_t next = 0;
  for (std::size_t id = 1; id < used.size(); ++id) {
    if (used[id]) remap[id] = ++next;
  }
  for (std::size_t p = 0; p < labels.size(); ++p) labels[p] = remap[labels[p]];
  return InstanceMap{std::move(labels), next};
}

}  // namespace footprint
