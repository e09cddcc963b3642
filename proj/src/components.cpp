#include "footprint/components.hpp"

#include <numeric>
#include <vector>

namespace footprint {
namespace {

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::uint32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }
  void join(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller provisional label as root; provisional labels are
    // created in scan order so the root is always the earliest seen.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

InstanceMap connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  const bool eight = connectivity == Connectivity::kEight;

  // Provisional labels are 1-based; index 0 of the set is unused background.
  Raster<std::uint32_t> provisional(h, w, 0u);
  DisjointSet sets;
  sets.make();

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!mask(y, x)) continue;
      std::uint32_t neighbors[4];
      int count = 0;
      if (x > 0 && provisional(y, x - 1)) neighbors[count++] = provisional(y, x - 1);
      if (y > 0) {
        if (provisional(y - 1, x)) neighbors[count++] = provisional(y - 1, x);
        if (eight && x > 0 && provisional(y - 1, x - 1)) {
          neighbors[count++] = provisional(y - 1, x - 1);
        }
        if (eight && x + 1 < w && provisional(y - 1, x + 1)) {
          neighbors[count++] = provisional(y - 1, x + 1);
        }
      }
      if (count == 0) {
        provisional(y, x) = sets.make();
        continue;
      }
      std::uint32_t label = neighbors[0];
      for (int i = 1; i < count; ++i) sets.join(label, neighbors[i]);
      provisional(y, x) = sets.find(label);
    }
  }

  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i]) provisional[i] = sets.find(provisional[i]);
  }
  return relabel_by_anchor(provisional, static_cast<std::uint32_t>(sets.size() - 1));
}

InstanceMap relabel_by_anchor(const Raster<std::uint32_t>& labels, std::uint32_t max_label,
                              const std::vector<bool>& drop) {
  std::vector<std::uint32_t> remap(static_cast<std::size_t>(max_label) + 1, 0);
  std::vector<bool> seen(static_cast<std::size_t>(max_label) + 1, false);
  std::uint32_t next = 0;
  InstanceMap out{Raster<std::uint32_t>(labels.height(), labels.width(), 0u), 0};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::uint32_t old = labels[i];
    if (old == 0) continue;
    if (old > max_label) {
      throw ValidationError("label " + std::to_string(old) + " exceeds max_label " +
                            std::to_string(max_label));
    }
    if (!seen[old]) {
      seen[old] = true;
      const bool dropped = old < drop.size() && drop[old];
      remap[old] = dropped ? 0 : ++next;
    }
    out.labels[i] = remap[old];
  }
  out.max_label = next;
  return out;
}

}  // namespace footprint
