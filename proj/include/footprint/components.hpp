#pragma once

#include "footprint/raster.hpp"

namespace footprint {

enum class Connectivity { kFour = 4, kEight = 8 };

/// Labels maximal connected regions of 1-pixels with dense labels 1..N.
/// Components are numbered by their first pixel in row-major order.
InstanceMap connected_components(const BinaryMask& mask,
                                 Connectivity connectivity = Connectivity::kEight);

/// Relabels an instance map so that used labels become 1..N ordered by each
/// label's first pixel in row-major order. Labels listed as dropped (value
/// true in `drop`, indexed by old label) are cleared to 0.
InstanceMap relabel_by_anchor(const Raster<std::uint32_t>& labels,
                              std::uint32_t max_label,
                              const std::vector<bool>& drop = {});

}  // namespace footprint
