#include "footprint/raster.hpp"

#include <algorithm>
#include <cmath>

namespace footprint {

Planes::Planes(std::size_t channels, std::size_t height, std::size_t width, float fill)
    : channels_(channels), height_(height), width_(width),
      data_(channels * height * width, fill) {
  if (channels == 0 || height == 0 || width == 0) {
    throw ValidationError("planes dimensions must be >= 1");
  }
}

Planes::Planes(std::size_t channels, std::size_t height, std::size_t width,
               std::vector<float> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  if (channels == 0 || height == 0 || width == 0) {
    throw ValidationError("planes dimensions must be >= 1");
  }
  if (data_.size() != channels * height * width) {
    throw ValidationError("planes data length does not match dimensions");
  }
}

std::span<float> Planes::channel(std::size_t c) {
  if (c >= channels_) {
    throw ValidationError("channel " + std::to_string(c) + " out of range (" +
                          std::to_string(channels_) + " channels)");
  }
  return std::span<float>(data_).subspan(c * plane_size(), plane_size());
}

std::span<const float> Planes::channel(std::size_t c) const {
  if (c >= channels_) {
    throw ValidationError("channel " + std::to_string(c) + " out of range (" +
                          std::to_string(channels_) + " channels)");
  }
  return std::span<const float>(data_).subspan(c * plane_size(), plane_size());
}

void validate_probabilities(const ProbMap& map) {
  for (std::size_t i = 0; i < map.values().size(); ++i) {
    const float v = map.values()[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw ValidationError("probability value out of [0,1] at flat index " +
                            std::to_string(i));
    }
  }
}

void validate_binary(const BinaryMask& mask) {
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] > 1) {
      throw ValidationError("binary mask value not in {0,1} at flat index " +
                            std::to_string(i));
    }
  }
}

std::size_t count_set(const BinaryMask& mask) {
  return static_cast<std::size_t>(
      std::count(mask.values().begin(), mask.values().end(), std::uint8_t{1}));
}

namespace {

template <class Op>
BinaryMask combine(const BinaryMask& a, const BinaryMask& b, const char* what, Op op) {
  require_same_shape(a, b, what);
  BinaryMask out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(op(a[i], b[i]) ? 1 : 0);
  }
  return out;
}

}  // namespace

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_and", [](auto x, auto y) { return x && y; });
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_or", [](auto x, auto y) { return x || y; });
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_and_not", [](auto x, auto y) { return x && !y; });
}

BinaryMask mask_xor(const BinaryMask& a, const BinaryMask& b) {
  return combine(a, b, "mask_xor", [](auto x, auto y) { return (x != 0) != (y != 0); });
}

BinaryMask mask_not(const BinaryMask& a) {
  BinaryMask out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ? 0 : 1;
  return out;
}

BinaryMask instance_support(const InstanceMap& map, std::uint32_t id) {
  BinaryMask out(map.height(), map.width());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = map.labels[i] == id ? 1 : 0;
  return out;
}

}  // namespace footprint
