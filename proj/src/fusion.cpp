#include "footprint/fusion.hpp"

#include <algorithm>
#include <array>

namespace footprint {
namespace {

template <class Get, class Put>
void remap_plane(std::size_t h, std::size_t w, ViewTransform view, Get get, Put put) {
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::size_t sy = y;
      std::size_t sx = x;
      switch (view) {
        case ViewTransform::kIdentity:
          break;
        case ViewTransform::kHFlip:
          sx = w - 1 - x;
          break;
        case ViewTransform::kVFlip:
          sy = h - 1 - y;
          break;
        case ViewTransform::kRot180:
          sy = h - 1 - y;
          sx = w - 1 - x;
          break;
      }
      put(y, x, get(sy, sx));
    }
  }
}

std::size_t view_index(ViewTransform view) { return static_cast<std::size_t>(view); }

}  // namespace

std::string_view view_suffix(ViewTransform view) {
  switch (view) {
    case ViewTransform::kIdentity:
      return "id";
    case ViewTransform::kHFlip:
      return "hf";
    case ViewTransform::kVFlip:
      return "vf";
    case ViewTransform::kRot180:
      return "r180";
  }
  return "id";
}

Planes apply_view(const Planes& map, ViewTransform view) {
  Planes out(map.channels(), map.height(), map.width());
  for (std::size_t c = 0; c < map.channels(); ++c) {
    remap_plane(
        map.height(), map.width(), view,
        [&](std::size_t y, std::size_t x) { return map.at(c, y, x); },
        [&](std::size_t y, std::size_t x, float v) { out.at(c, y, x) = v; });
  }
  return out;
}

BinaryMask apply_view(const BinaryMask& mask, ViewTransform view) {
  BinaryMask out(mask.height(), mask.width());
  remap_plane(
      mask.height(), mask.width(), view,
      [&](std::size_t y, std::size_t x) { return mask(y, x); },
      [&](std::size_t y, std::size_t x, std::uint8_t v) { out(y, x) = v; });
  return out;
}

ProbMap tta_average(std::span<const TaggedView> views) {
  if (views.size() != 4) {
    throw ValidationError("tta_average: expected 4 views, got " + std::to_string(views.size()));
  }
  std::array<const TaggedView*, 4> by_view{};
  for (const TaggedView& v : views) {
    auto& slot = by_view[view_index(v.view)];
    if (slot != nullptr) {
      throw ValidationError("tta_average: view '" + std::string(view_suffix(v.view)) +
                            "' supplied twice");
    }
    slot = &v;
  }
  const Planes& ref = by_view[0]->map;
  std::array<Planes, 4> aligned;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!by_view[i]->map.same_shape(ref)) {
      throw ValidationError("tta_average: view dimensions or channels differ");
    }
    aligned[i] = apply_view(by_view[i]->map, by_view[i]->view);
  }
  return ensemble_average(aligned);
}

ProbMap ensemble_average(std::span<const ProbMap> maps) {
  if (maps.empty()) throw ValidationError("ensemble_average: no maps");
  const Planes& ref = maps.front();
  for (const Planes& m : maps) {
    if (!m.same_shape(ref)) {
      throw ValidationError("ensemble_average: dimensions or channels differ");
    }
  }
  Planes out(ref.channels(), ref.height(), ref.width());
  const std::size_t n = ref.values().size();
  std::vector<float> samples(maps.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < maps.size(); ++k) samples[k] = maps[k].values()[i];
    std::sort(samples.begin(), samples.end());
    double sum = 0.0;
    for (const float s : samples) sum += static_cast<double>(s);
    out.values()[i] = static_cast<float>(sum / static_cast<double>(maps.size()));
  }
  return out;
}

BinaryMask binarize(const ProbMap& map, std::size_t channel, float threshold) {
  const auto plane = map.channel(channel);
  BinaryMask out(map.height(), map.width());
  for (std::size_t i = 0; i < plane.size(); ++i) out[i] = plane[i] >= threshold ? 1 : 0;
  return out;
}

}  // namespace footprint
