#include <array>
#include <limits>
#include <vector>

#include "footprint/extract.hpp"

namespace footprint {
namespace {

struct Step {
  std::ptrdiff_t dx;
  std::ptrdiff_t dy;
};

// East, south, west, north; +1 turns right (clockwise on screen), +3 left.
constexpr std::array<Step, 4> kHeadings = {{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
constexpr int kEast = 0;

class LabelView {
 public:
  LabelView(const Raster<std::uint32_t>& labels, std::uint32_t id) : labels_(labels), id_(id) {}

  bool contains(std::ptrdiff_t col, std::ptrdiff_t row) const {
    if (col < 0 || row < 0 || row >= static_cast<std::ptrdiff_t>(labels_.height()) ||
        col >= static_cast<std::ptrdiff_t>(labels_.width())) {
      return false;
    }
    return labels_(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) == id_;
  }

  // Pixel occupying the unit square spanned by corners (x0,y0) and (x1,y1).
  bool square(std::ptrdiff_t x0, std::ptrdiff_t y0, std::ptrdiff_t x1, std::ptrdiff_t y1) const {
    return contains(std::min(x0, x1), std::min(y0, y1));
  }

 private:
  const Raster<std::uint32_t>& labels_;
  std::uint32_t id_;
};

// Walks the pixel-edge boundary keeping the label on the right-hand side.
// Diagonal contacts are treated as connected, so the ring can touch itself
// at a corner but never splits an 8-connected shape.
PolygonRing trace_exterior(const LabelView& view, std::ptrdiff_t col, std::ptrdiff_t row) {
  PolygonRing ring;
  const std::ptrdiff_t sx = col;
  const std::ptrdiff_t sy = row;
  ring.vertices.push_back({static_cast<double>(sx), static_cast<double>(sy)});
  int heading = kEast;
  std::ptrdiff_t x = sx + kHeadings[kEast].dx;
  std::ptrdiff_t y = sy + kHeadings[kEast].dy;
  for (;;) {
    const Step d = kHeadings[static_cast<std::size_t>(heading)];
    const Step n = kHeadings[static_cast<std::size_t>((heading + 1) % 4)];
    const bool ahead_left = view.square(x, y, x + d.dx - n.dx, y + d.dy - n.dy);
    const bool ahead_right = view.square(x, y, x + d.dx + n.dx, y + d.dy + n.dy);
    int next = heading;
    if (ahead_left) {
      next = (heading + 3) % 4;
    } else if (!ahead_right) {
      next = (heading + 1) % 4;
    }
    if (x == sx && y == sy && next == kEast) break;
    if (next != heading) {
      ring.vertices.push_back({static_cast<double>(x), static_cast<double>(y)});
    }
    heading = next;
    x += kHeadings[static_cast<std::size_t>(heading)].dx;
    y += kHeadings[static_cast<std::size_t>(heading)].dy;
  }
  return ring;
}

}  // namespace

PolygonSet polygonize(const InstanceMap& instances) {
  const auto& labels = instances.labels;
  const std::size_t n = static_cast<std::size_t>(instances.max_label) + 1;
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> anchor(n, kNone);
  std::vector<std::size_t> area(n, 0);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const std::uint32_t id = labels[p];
    if (id == 0) continue;
    if (id > instances.max_label) throw ValidationError("polygonize: label exceeds max_label");
    if (anchor[id] == kNone) anchor[id] = p;
    ++area[id];
  }

  PolygonSet out;
  out.height = instances.height();
  out.width = instances.width();
  for (std::uint32_t id = 1; id < n; ++id) {
    if (anchor[id] == kNone) continue;
    const auto row = static_cast<std::ptrdiff_t>(anchor[id] / labels.width());
    const auto col = static_cast<std::ptrdiff_t>(anchor[id] % labels.width());
    out.instances.push_back(
        PolygonInstance{id, trace_exterior(LabelView(labels, id), col, row), area[id]});
  }
  return out;
}

}  // namespace footprint
