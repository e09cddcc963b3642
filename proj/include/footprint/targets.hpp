#pragma once

#include <vector>

#include "footprint/geometry.hpp"
#include "footprint/raster.hpp"

namespace footprint {

/// Ground-truth channels in their fixed file order.
struct TargetStack {
  BinaryMask building;
  BinaryMask border;
  BinaryMask spacing;
};

inline constexpr std::size_t kBorderErosions = 2;
inline constexpr std::size_t kBorderKernel = 3;
inline constexpr std::size_t kSpacingKernel = 15;
inline constexpr std::size_t kSpacingMaxDistance = 8;

/// Even-odd fill sampled at pixel centers (j+0.5, i+0.5).
///
/// A center lying exactly on an edge is inside when the edge bounds the
/// polygon from the top or from the right: scanline spans are half-open
/// (x_enter, x_leave] and edges cover y in [y_min, y_max). Adjacent polygons
/// sharing an edge therefore never both claim a pixel, and a zero-area ring
/// fills nothing. Throws ValidationError for rings with fewer than 3 vertices.
BinaryMask rasterize_polygon(const PolygonRing& ring, std::size_t height, std::size_t width);

/// Fills `ring` into an existing canvas (logical OR).
void fill_polygon(const PolygonRing& ring, BinaryMask& canvas);

/// Per polygon: fill, erode `erosion_iterations` times, XOR with the fill;
/// the union over polygons is the border mask. A bad ring aborts the call
/// with an error naming its index.
BinaryMask make_border_mask(const std::vector<PolygonRing>& rings, std::size_t height,
                            std::size_t width,
                            std::size_t erosion_iterations = kBorderErosions,
                            KernelSpec kernel = KernelSpec(kBorderKernel));

/// Separation pixels between buildings at most 2 * max_dist apart.
///
/// The building mask is dilated, split by a seeded watershed (seeds are the
/// 8-connected buildings), and the pixels on the split lines that lie within
/// `max_dist` (Chebyshev) of a building, and outside every building, are kept.
BinaryMask make_spacing_mask(const BinaryMask& building,
                             KernelSpec dilate_kernel = KernelSpec(kSpacingKernel),
                             std::size_t max_dist = kSpacingMaxDistance);

TargetStack assemble_targets(const std::vector<PolygonRing>& rings, std::size_t height,
                             std::size_t width);

/// Packs the stack into a 3-channel map ordered (building, border, spacing).
Planes targets_to_planes(const TargetStack& targets);

}  // namespace footprint
