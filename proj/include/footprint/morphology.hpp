#pragma once

#include "footprint/raster.hpp"

namespace footprint {

/// Binary erosion with a centered square kernel; pixels outside the canvas
/// count as 0, so anything within `radius` of the edge erodes away.
/// `iterations == 0` returns the input unchanged.
BinaryMask erode(const BinaryMask& mask, KernelSpec kernel, std::size_t iterations = 1);

/// Binary dilation with a centered square kernel, clipped at the canvas edge.
BinaryMask dilate(const BinaryMask& mask, KernelSpec kernel, std::size_t iterations = 1);

}  // namespace footprint
