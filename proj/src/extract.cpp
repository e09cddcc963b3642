#include "footprint/extract.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "footprint/components.hpp"
#include "footprint/fusion.hpp"

namespace footprint {

InstanceMap make_seeds(const BinaryMask& building, const BinaryMask& border) {
  require_same_shape(building, border, "make_seeds");
  return connected_components(mask_and_not(building, border), Connectivity::kEight);
}

InstanceMap watershed_assign(const InstanceMap& seeds, const BinaryMask& region) {
  if (!seeds.labels.same_shape(region)) {
    throw ValidationError("watershed_assign: seed and region dimensions differ");
  }
  const std::size_t h = region.height();
  const std::size_t w = region.width();
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

  InstanceMap out{Raster<std::uint32_t>(h, w, 0u), seeds.max_label};
  std::vector<std::uint32_t> dist(region.size(), kUnset);
  std::vector<std::size_t> frontier;
  for (std::size_t p = 0; p < region.size(); ++p) {
    const std::uint32_t label = seeds.labels[p];
    if (label == 0) continue;
    if (!region[p]) {
      throw ValidationError("watershed_assign: seed pixel (" + std::to_string(p / w) + ", " +
                            std::to_string(p % w) + ") lies outside the region");
    }
    if (label > seeds.max_label) {
      throw ValidationError("watershed_assign: seed label exceeds max_label");
    }
    out.labels[p] = label;
    dist[p] = 0;
    frontier.push_back(p);
  }

  // Layer-synchronous expansion: a pixel first reached at depth d+1 takes the
  // smallest label among its depth-d neighbours, which by induction is the
  // smallest label among its nearest seeds.
  std::vector<std::size_t> next;
  for (std::uint32_t d = 0; !frontier.empty(); ++d) {
    next.clear();
    for (const std::size_t p : frontier) {
      const std::size_t y = p / w;
      const std::size_t x = p % w;
      const std::uint32_t label = out.labels[p];
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx == 0) continue;
          const auto ny = static_cast<std::ptrdiff_t>(y) + dy;
          const auto nx = static_cast<std::ptrdiff_t>(x) + dx;
          if (ny < 0 || nx < 0 || ny >= static_cast<std::ptrdiff_t>(h) ||
              nx >= static_cast<std::ptrdiff_t>(w)) {
            continue;
          }
          const std::size_t q = static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx);
          if (!region[q]) continue;
          if (dist[q] == kUnset) {
            dist[q] = d + 1;
            out.labels[q] = label;
            next.push_back(q);
          } else if (dist[q] == d + 1 && label < out.labels[q]) {
            out.labels[q] = label;
          }
        }
      }
    }
    frontier.swap(next);
  }

  // Seedless region components: one fresh label each, in anchor order.
  BinaryMask orphan(h, w);
  bool any_orphan = false;
  for (std::size_t p = 0; p < region.size(); ++p) {
    if (region[p] && dist[p] == kUnset) {
      orphan[p] = 1;
      any_orphan = true;
    }
  }
  if (any_orphan) {
    const InstanceMap fresh = connected_components(orphan, Connectivity::kEight);
    for (std::size_t p = 0; p < region.size(); ++p) {
      if (fresh.labels[p]) out.labels[p] = seeds.max_label + fresh.labels[p];
    }
    out.max_label = seeds.max_label + fresh.max_label;
  }
  return out;
}

InstanceMap filter_small(const InstanceMap& instances, std::size_t min_area) {
  std::vector<std::size_t> area(static_cast<std::size_t>(instances.max_label) + 1, 0);
  for (const std::uint32_t label : instances.labels.values()) {
    if (label > instances.max_label) {
      throw ValidationError("filter_small: label exceeds max_label");
    }
    ++area[label];
  }
  std::vector<bool> drop(area.size(), false);
  for (std::size_t label = 1; label < area.size(); ++label) drop[label] = area[label] < min_area;
  return relabel_by_anchor(instances.labels, instances.max_label, drop);
}

Extraction extract_single_class_full(const BinaryMask& building, std::size_t min_area) {
  InstanceMap instances =
      filter_small(connected_components(building, Connectivity::kEight), min_area);
  PolygonSet polygons = polygonize(instances);
  return Extraction{std::move(instances), std::move(polygons)};
}

PolygonSet extract_single_class(const BinaryMask& building, std::size_t min_area) {
  return extract_single_class_full(building, min_area).polygons;
}

Extraction extract_multi_class_full(const ProbMap& fused, const MultiClassOptions& options) {
  if (fused.channels() < 2) {
    throw ValidationError("extract_multi_class: need building and border channels, got " +
                          std::to_string(fused.channels()));
  }
  BinaryMask building = binarize(fused, 0, options.threshold);
  const BinaryMask border = binarize(fused, 1, options.threshold);
  if (options.use_spacing && fused.channels() >= 3) {
    building = mask_and_not(building, binarize(fused, 2, options.threshold));
  }
  const InstanceMap seeds = make_seeds(building, border);
  InstanceMap instances = filter_small(watershed_assign(seeds, building), options.min_area);
  PolygonSet polygons = polygonize(instances);
  return Extraction{std::move(instances), std::move(polygons)};
}

PolygonSet extract_multi_class(const ProbMap& fused, const MultiClassOptions& options) {
  return extract_multi_class_full(fused, options).polygons;
}

}  // namespace footprint
