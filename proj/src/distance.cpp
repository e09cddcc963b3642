#include "footprint/distance.hpp"

#include <limits>
#include <vector>

namespace footprint {

DistanceMap chebyshev_distance(const BinaryMask& mask) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> dist(mask.size(), kUnset);
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      dist[i] = 0;
      frontier.push_back(i);
    }
  }

  // On an obstacle-free grid, 8-neighbour BFS depth is the Chebyshev distance.
  std::vector<std::size_t> next;
  for (std::uint32_t d = 1; !frontier.empty(); ++d) {
    next.clear();
    for (const std::size_t p : frontier) {
      const std::size_t y = p / w;
      const std::size_t x = p % w;
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
          if (dist[q] == kUnset) {
            dist[q] = d;
            next.push_back(q);
          }
        }
      }
    }
    frontier.swap(next);
  }

  DistanceMap out(h, w, unreachable_distance(mask));
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] != kUnset) out[i] = static_cast<float>(dist[i]);
  }
  return out;
}

}  // namespace footprint
