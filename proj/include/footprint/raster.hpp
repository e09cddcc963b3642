#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace footprint {

/// Thrown when a caller violates a documented precondition (dimension
/// mismatch, out-of-range parameter, malformed geometry).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when reading or writing an artifact fails.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major 2-D grid.
template <class T>
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t height, std::size_t width, T fill = T{})
      : height_(height), width_(width), data_(height * width, fill) {
    if (height == 0 || width == 0) {
      throw ValidationError("raster dimensions must be >= 1");
    }
  }
  Raster(std::size_t height, std::size_t width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (height == 0 || width == 0) {
      throw ValidationError("raster dimensions must be >= 1");
    }
    if (data_.size() != height * width) {
      throw ValidationError("raster data length does not match dimensions");
    }
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const {
    return data_[row * width_ + col];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool same_shape(const Raster& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  template <class U>
  bool same_shape(const Raster<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

/// Single-channel {0,1} raster; the carrier of every class mask.
using BinaryMask = Raster<std::uint8_t>;

/// Chebyshev pixel distances.
using DistanceMap = Raster<float>;

/// Instance labels, 0 = background, used labels exactly {1..max_label}.
struct InstanceMap {
  Raster<std::uint32_t> labels;
  std::uint32_t max_label = 0;

  std::size_t height() const { return labels.height(); }
  std::size_t width() const { return labels.width(); }
  bool operator==(const InstanceMap&) const = default;
};

/// Channel-major, row-major stack of 32-bit float planes.
///
/// Used both for probability maps (values in [0,1], see validate_probabilities)
/// and for raw image rasters fed to CutMix.
class Planes {
 public:
  Planes() = default;
  Planes(std::size_t channels, std::size_t height, std::size_t width, float fill = 0.0f);
  Planes(std::size_t channels, std::size_t height, std::size_t width,
         std::vector<float> data);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t plane_size() const { return height_ * width_; }

  std::span<float> channel(std::size_t c);
  std::span<const float> channel(std::size_t c) const;

  float& at(std::size_t c, std::size_t row, std::size_t col) {
    return data_[(c * height_ + row) * width_ + col];
  }
  float at(std::size_t c, std::size_t row, std::size_t col) const {
    return data_[(c * height_ + row) * width_ + col];
  }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  bool same_shape(const Planes& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }

  bool operator==(const Planes&) const = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<float> data_;
};

using ProbMap = Planes;
using ImageRaster = Planes;

/// Throws ValidationError if any value is outside [0,1] or NaN.
void validate_probabilities(const ProbMap& map);

/// Throws ValidationError if any value is not 0 or 1.
void validate_binary(const BinaryMask& mask);

/// Square structuring element with odd side.
class KernelSpec {
 public:
  explicit KernelSpec(std::size_t side) : side_(side) {
    if (side == 0 || side % 2 == 0) {
      throw ValidationError("kernel side must be odd and >= 1, got " +
                            std::to_string(side));
    }
  }
  std::size_t side() const { return side_; }
  std::size_t radius() const { return (side_ - 1) / 2; }

 private:
  std::size_t side_;
};

inline void require_same_shape(const BinaryMask& a, const BinaryMask& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                          " vs " + std::to_string(b.height()) + "x" +
                          std::to_string(b.width()) + ")");
  }
}

std::size_t count_set(const BinaryMask& mask);

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_xor(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_not(const BinaryMask& a);

/// Pixel set {label == id} of an instance map.
BinaryMask instance_support(const InstanceMap& map, std::uint32_t id);

}  // namespace footprint
