#include "footprint/morphology.hpp"

#include <vector>

namespace footprint {
namespace {

enum class Extremum { kMin, kMax };

// One separable pass along a line of `n` samples spaced `stride` apart.
// A window is the clipped interval [i-r, i+r]; out-of-line samples are 0.
void window_pass(const std::uint8_t* in, std::uint8_t* out, std::size_t n,
                 std::size_t stride, std::size_t r, Extremum kind,
                 std::vector<std::size_t>& prefix) {
  prefix.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + in[i * stride];
  const std::size_t full = 2 * r + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= r ? i - r : 0;
    const std::size_t hi = std::min(n, i + r + 1);
    const std::size_t ones = prefix[hi] - prefix[lo];
    std::uint8_t v;
    if (kind == Extremum::kMin) {
      // A window sticking out of the line contains implicit zeros.
      v = (hi - lo == full && ones == full) ? 1 : 0;
    } else {
      v = ones > 0 ? 1 : 0;
    }
    out[i * stride] = v;
  }
}

BinaryMask square_pass(const BinaryMask& mask, std::size_t r, Extremum kind) {
  const std::size_t h = mask.height();
  const std::size_t w = mask.width();
  BinaryMask rows(h, w);
  BinaryMask out(h, w);
  std::vector<std::size_t> prefix;
  for (std::size_t y = 0; y < h; ++y) {
    window_pass(&mask[y * w], &rows[y * w], w, 1, r, kind, prefix);
  }
  for (std::size_t x = 0; x < w; ++x) {
    window_pass(&rows[x], &out[x], h, w, r, kind, prefix);
  }
  return out;
}

BinaryMask iterate(const BinaryMask& mask, KernelSpec kernel, std::size_t iterations,
                   Extremum kind) {
  BinaryMask current = mask;
  for (std::size_t i = 0; i < iterations; ++i) {
    current = square_pass(current, kernel.radius(), kind);
  }
  return current;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, KernelSpec kernel, std::size_t iterations) {
  return iterate(mask, kernel, iterations, Extremum::kMin);
}

BinaryMask dilate(const BinaryMask& mask, KernelSpec kernel, std::size_t iterations) {
  return iterate(mask, kernel, iterations, Extremum::kMax);
}

}  // namespace footprint
