#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "footprint/raster.hpp"

namespace footprint {

/// Positional test-time augmentation; every view is its own inverse.
enum class ViewTransform { kIdentity, kHFlip, kVFlip, kRot180 };

inline constexpr ViewTransform kAllViews[] = {ViewTransform::kIdentity, ViewTransform::kHFlip,
                                              ViewTransform::kVFlip, ViewTransform::kRot180};

/// File-name suffix used by the CLI: "id", "hf", "vf", "r180".
std::string_view view_suffix(ViewTransform view);

Planes apply_view(const Planes& map, ViewTransform view);
BinaryMask apply_view(const BinaryMask& mask, ViewTransform view);

struct TaggedView {
  ViewTransform view;
  ProbMap map;
};

/// Maps each view back through its inverse and averages the four aligned
/// maps. Exactly one map per view is required; supply order is irrelevant.
ProbMap tta_average(std::span<const TaggedView> views);

/// Pixelwise mean. Each pixel's values are summed in ascending order in
/// double precision and rounded to float once, so the result does not
/// depend on the order of `maps`.
ProbMap ensemble_average(std::span<const ProbMap> maps);

/// 1 where map[channel] >= threshold.
BinaryMask binarize(const ProbMap& map, std::size_t channel, float threshold = 0.3f);

}  // namespace footprint
