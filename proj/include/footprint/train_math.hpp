#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "footprint/raster.hpp"
#include "footprint/targets.hpp"

namespace footprint {

struct LossParams {
  double beta = 1.0;
  double eps = 1e-4;
  double gamma1 = 0.5;  // BCE weight
  double gamma2 = 0.5;  // Dice weight
  double clamp = 1e-7;

  void validate() const;
};

/// Relative weight of each output channel in the total loss.
struct ChannelWeights {
  double building = 1.0;
  double border = 2.0;
  double spacing = 2.0;
};

/// Scalar loss with its derivative with respect to every prediction pixel.
struct LossResult {
  double value = 0.0;
  Raster<double> gradient;
};

/// Soft F-beta Dice loss over the whole raster.
LossResult dice_loss(const Raster<double>& pred, const BinaryMask& gt, const LossParams& params = {});

/// Mean binary cross-entropy with predictions clamped to [clamp, 1-clamp];
/// the gradient is zero wherever the clamp is active.
LossResult bce_loss(const Raster<double>& pred, const BinaryMask& gt, const LossParams& params = {});

/// gamma1 * BCE + gamma2 * Dice.
LossResult channel_loss(const Raster<double>& pred, const BinaryMask& gt,
                        const LossParams& params = {});

/// (sum_i w_i L_i) / (sum_i w_i). Weights and losses must have equal length.
double total_loss(std::span<const double> channel_losses, std::span<const double> weights);
double total_loss(std::span<const double> channel_losses, const ChannelWeights& weights);

struct ScheduleParams {
  double total_epochs = 100.0;
  double up_epochs = 40.0;
  double lr_init = 0.0001 / 20.0;
  double lr_max = 0.0001;
  double lr_final = (0.0001 / 20.0) / 1000.0;
  double poly_power = 0.9;
  double poly_lr0 = 0.001;

  void validate() const;
};

/// lr0 * (1 - epoch/total)^power.
double lr_poly(double epoch, const ScheduleParams& params = {});

/// Recursive form lr_{t+1} = lr_t * (1 - t/total)^power with lr_0 = poly_lr0,
/// evaluated at integer epochs. Kept for comparison with the closed form.
double lr_poly_recursive(std::uint32_t epoch, const ScheduleParams& params = {});

/// Cosine ramp from lr_init to lr_max over up_epochs, then cosine decay to
/// lr_final at total_epochs.
double lr_one_cycle(double epoch, const ScheduleParams& params = {});

/// Half-open pixel rectangle [row, row+rows) x [col, col+cols).
struct Box {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool operator==(const Box&) const = default;
};

struct Sample {
  ImageRaster image;
  TargetStack targets;
};

/// Box sampler: mix ratio lambda ~ U[0,1], side fractions sqrt(1 - lambda),
/// center uniform over the canvas, clipped to the canvas. Deterministic for a
/// given seed on every platform.
Box sample_cutmix_box(std::size_t height, std::size_t width, std::uint64_t seed);

/// Output equals `a` outside the box and `b` inside it, for the image and all
/// three target channels.
Sample cutmix(const Sample& a, const Sample& b, const Box& box);

}  // namespace footprint
