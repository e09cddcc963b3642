#pragma once

#include "footprint/raster.hpp"

namespace footprint {

/// Value stored where no set pixel exists anywhere on the canvas.
inline float unreachable_distance(const BinaryMask& mask) {
  return static_cast<float>(mask.height() + mask.width() + 1);
}

/// Chebyshev (8-neighbour) distance from every pixel to the nearest 1-pixel.
/// An all-zero mask yields unreachable_distance(mask) everywhere.
DistanceMap chebyshev_distance(const BinaryMask& mask);

}  // namespace footprint
