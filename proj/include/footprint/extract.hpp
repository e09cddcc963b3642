#pragma once

#include "footprint/geometry.hpp"
#include "footprint/raster.hpp"

namespace footprint {

inline constexpr std::size_t kMinInstanceArea = 140;
inline constexpr float kDefaultThreshold = 0.3f;

/// Building nuclei: 8-connected components of building AND NOT border.
InstanceMap make_seeds(const BinaryMask& building, const BinaryMask& border);

/// Seeded watershed on a binary region.
///
/// Every region pixel reachable (8-adjacency inside the region) from a seed
/// takes the label of its geodesically nearest seed; equal distances resolve
/// to the smaller label. Region components without any seed each receive a
/// fresh label after the seed labels, ordered by their first row-major
/// pixel. Pixels outside the region stay 0. Throws ValidationError when a
/// seed pixel lies outside the region.
InstanceMap watershed_assign(const InstanceMap& seeds, const BinaryMask& region);

/// Clears instances with fewer than `min_area` pixels and relabels the
/// survivors 1..N in row-major order of their first pixel.
InstanceMap filter_small(const InstanceMap& instances, std::size_t min_area = kMinInstanceArea);

/// Traces the outer pixel-edge boundary of every label. Rings start at the
/// top-left corner of the label's first pixel, run counter-clockwise in image
/// coordinates, and keep only corner vertices. Holes are not traced.
PolygonSet polygonize(const InstanceMap& instances);

/// 1-class path: 8-connected components, area filter, polygonize.
PolygonSet extract_single_class(const BinaryMask& building,
                                std::size_t min_area = kMinInstanceArea);

struct MultiClassOptions {
  float threshold = kDefaultThreshold;
  std::size_t min_area = kMinInstanceArea;
  /// Remove binarized spacing pixels from the building mask when a third
  /// channel is present.
  bool use_spacing = true;
};

/// Instance map and polygons produced by the multi-class path.
struct Extraction {
  InstanceMap instances;
  PolygonSet polygons;
};

/// Multi-class path over a fused (building, border[, spacing]) map:
/// binarize, subtract border to form seeds, watershed over the building
/// mask, area filter, polygonize.
Extraction extract_multi_class_full(const ProbMap& fused, const MultiClassOptions& options = {});
PolygonSet extract_multi_class(const ProbMap& fused, const MultiClassOptions& options = {});

/// Single-class path returning both the instance map and polygons.
Extraction extract_single_class_full(const BinaryMask& building,
                                     std::size_t min_area = kMinInstanceArea);

}  // namespace footprint
