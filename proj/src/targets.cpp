#include "footprint/targets.hpp"

#include <algorithm>
#include <cmath>

#include "footprint/components.hpp"
#include "footprint/distance.hpp"
#include "footprint/extract.hpp"
#include "footprint/morphology.hpp"

namespace footprint {

double signed_area(const PolygonRing& ring) {
  const auto& v = ring.vertices;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

void fill_polygon(const PolygonRing& ring, BinaryMask& canvas) {
  const auto& v = ring.vertices;
  if (v.size() < 3) {
    throw ValidationError("polygon ring needs at least 3 vertices, got " +
                          std::to_string(v.size()));
  }
  for (const Point& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("polygon ring has a non-finite coordinate");
    }
  }
  const auto w = static_cast<std::ptrdiff_t>(canvas.width());
  double y_lo = v[0].y;
  double y_hi = v[0].y;
  for (const Point& p : v) {
    y_lo = std::min(y_lo, p.y);
    y_hi = std::max(y_hi, p.y);
  }
  const auto row_begin = static_cast<std::ptrdiff_t>(
      std::max(0.0, std::ceil(y_lo - 0.5)));
  const auto row_end = static_cast<std::ptrdiff_t>(
      std::min(static_cast<double>(canvas.height()), std::floor(y_hi - 0.5) + 1.0));

  std::vector<double> crossings;
  for (std::ptrdiff_t row = row_begin; row < row_end; ++row) {
    const double cy = static_cast<double>(row) + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point& a = v[i];
      const Point& b = v[(i + 1) % v.size()];
      if ((a.y <= cy) == (b.y <= cy)) continue;  // covers y in [min, max)
      crossings.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      // Centers with x_enter < cx <= x_leave.
      const auto first = static_cast<std::ptrdiff_t>(std::floor(crossings[k] - 0.5)) + 1;
      const auto last = static_cast<std::ptrdiff_t>(std::floor(crossings[k + 1] - 0.5));
      for (std::ptrdiff_t col = std::max<std::ptrdiff_t>(first, 0);
           col <= std::min<std::ptrdiff_t>(last, w - 1); ++col) {
        canvas(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) = 1;
      }
    }
  }
}

BinaryMask rasterize_polygon(const PolygonRing& ring, std::size_t height, std::size_t width) {
  BinaryMask canvas(height, width);
  fill_polygon(ring, canvas);
  return canvas;
}

BinaryMask make_border_mask(const std::vector<PolygonRing>& rings, std::size_t height,
                            std::size_t width, std::size_t erosion_iterations,
                            KernelSpec kernel) {
  BinaryMask borders(height, width);
  for (std::size_t i = 0; i < rings.size(); ++i) {
    BinaryMask filled;
    try {
      filled = rasterize_polygon(rings[i], height, width);
    } catch (const ValidationError& e) {
      throw ValidationError("ring " + std::to_string(i) + ": " + e.what());
    }
    const BinaryMask eroded = erode(filled, kernel, erosion_iterations);
    const BinaryMask ring_border = mask_xor(filled, eroded);
    for (std::size_t p = 0; p < borders.size(); ++p) borders[p] |= ring_border[p];
  }
  return borders;
}

BinaryMask make_spacing_mask(const BinaryMask& building, KernelSpec dilate_kernel,
                             std::size_t max_dist) {
  const std::size_t h = building.height();
  const std::size_t w = building.width();
  const BinaryMask dilated = dilate(building, dilate_kernel, 1);
  const InstanceMap seeds = connected_components(building, Connectivity::kEight);
  const InstanceMap basins = watershed_assign(seeds, dilated);

  // Split-line pixels: dilated pixels touching (8-adjacency) another basin.
  BinaryMask split_lines(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::uint32_t own = basins.labels(y, x);
      if (!dilated(y, x) || own == 0) continue;
      bool boundary = false;
      for (int dy = -1; dy <= 1 && !boundary; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const auto ny = static_cast<std::ptrdiff_t>(y) + dy;
          const auto nx = static_cast<std::ptrdiff_t>(x) + dx;
          if (ny < 0 || nx < 0 || ny >= static_cast<std::ptrdiff_t>(h) ||
              nx >= static_cast<std::ptrdiff_t>(w)) {
            continue;
          }
          const std::uint32_t other =
              basins.labels(static_cast<std::size_t>(ny), static_cast<std::size_t>(nx));
          if (other != 0 && other != own) {
            boundary = true;
            break;
          }
        }
      }
      split_lines(y, x) = boundary ? 1 : 0;
    }
  }
  const BinaryMask without_lines = mask_and_not(dilated, split_lines);
  const BinaryMask lines = mask_xor(dilated, without_lines);

  const DistanceMap dist = chebyshev_distance(building);
  BinaryMask spacing(h, w);
  const auto limit = static_cast<float>(max_dist);
  for (std::size_t p = 0; p < spacing.size(); ++p) {
    spacing[p] = (lines[p] && dist[p] <= limit && !building[p]) ? 1 : 0;
  }
  return spacing;
}

TargetStack assemble_targets(const std::vector<PolygonRing>& rings, std::size_t height,
                             std::size_t width) {
  BinaryMask building(height, width);
  for (std::size_t i = 0; i < rings.size(); ++i) {
    try {
      fill_polygon(rings[i], building);
    } catch (const ValidationError& e) {
      throw ValidationError("ring " + std::to_string(i) + ": " + e.what());
    }
  }
  BinaryMask border = make_border_mask(rings, height, width);
  BinaryMask spacing = make_spacing_mask(building);
  return TargetStack{std::move(building), std::move(border), std::move(spacing)};
}

Planes targets_to_planes(const TargetStack& targets) {
  const std::size_t h = targets.building.height();
  const std::size_t w = targets.building.width();
  require_same_shape(targets.building, targets.border, "targets_to_planes");
  require_same_shape(targets.building, targets.spacing, "targets_to_planes");
  Planes planes(3, h, w);
  const BinaryMask* order[3] = {&targets.building, &targets.border, &targets.spacing};
  for (std::size_t c = 0; c < 3; ++c) {
    auto dst = planes.channel(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (*order[c])[i] ? 1.0f : 0.0f;
  }
  return planes;
}

}  // namespace footprint
