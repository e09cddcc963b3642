#include "footprint/train_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace footprint {
namespace {

void require_match(const Raster<double>& pred, const BinaryMask& gt, const char* what) {
  if (!pred.same_shape(gt)) {
    throw ValidationError(std::string(what) + ": prediction and target dimensions differ");
  }
}

void require_epoch(double epoch, const ScheduleParams& params) {
  if (!(epoch >= 0.0 && epoch <= params.total_epochs)) {
    throw ValidationError("epoch " + std::to_string(epoch) + " outside [0, " +
                          std::to_string(params.total_epochs) + "]");
  }
}

}  // namespace

void LossParams::validate() const {
  if (!(eps > 0.0)) throw ValidationError("dice eps must be > 0");
  if (!(gamma1 + gamma2 > 0.0)) throw ValidationError("gamma1 + gamma2 must be > 0");
  if (!(clamp > 0.0 && clamp < 0.5)) throw ValidationError("clamp must lie in (0, 0.5)");
}

LossResult dice_loss(const Raster<double>& pred, const BinaryMask& gt, const LossParams& params) {
  require_match(pred, gt, "dice_loss");
  params.validate();
  const double b2 = params.beta * params.beta;
  const double a = 1.0 + b2;
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    const double g = gt[i] ? 1.0 : 0.0;
    tp += p * g;
    fp += p * (1.0 - g);
    fn += (1.0 - p) * g;
  }
  const double num = a * tp + params.eps;
  const double den = a * tp + b2 * fn + fp + params.eps;

  LossResult out{1.0 - num / den, Raster<double>(pred.height(), pred.width(), 0.0)};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double g = gt[i] ? 1.0 : 0.0;
    const double dnum = a * g;
    const double dden = a * g - b2 * g + (1.0 - g);
    out.gradient[i] = -(dnum * den - num * dden) / (den * den);
  }
  return out;
}

LossResult bce_loss(const Raster<double>& pred, const BinaryMask& gt, const LossParams& params) {
  require_match(pred, gt, "bce_loss");
  params.validate();
  const double n = static_cast<double>(pred.size());
  const double lo = params.clamp;
  const double hi = 1.0 - params.clamp;
  LossResult out{0.0, Raster<double>(pred.height(), pred.width(), 0.0)};
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    const double pc = std::clamp(p, lo, hi);
    const bool g = gt[i] != 0;
    sum += g ? -std::log(pc) : -std::log1p(-pc);
    if (p >= lo && p <= hi) {
      out.gradient[i] = (g ? -1.0 / p : 1.0 / (1.0 - p)) / n;
    }
  }
  out.value = sum / n;
  return out;
}

LossResult channel_loss(const Raster<double>& pred, const BinaryMask& gt,
                        const LossParams& params) {
  const LossResult bce = bce_loss(pred, gt, params);
  const LossResult dice = dice_loss(pred, gt, params);
  LossResult out{params.gamma1 * bce.value + params.gamma2 * dice.value,
                 Raster<double>(pred.height(), pred.width(), 0.0)};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    out.gradient[i] = params.gamma1 * bce.gradient[i] + params.gamma2 * dice.gradient[i];
  }
  return out;
}

double total_loss(std::span<const double> channel_losses, std::span<const double> weights) {
  if (channel_losses.size() != weights.size()) {
    throw ValidationError("total_loss: " + std::to_string(channel_losses.size()) +
                          " losses but " + std::to_string(weights.size()) + " weights");
  }
  double weighted = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw ValidationError("total_loss: negative channel weight");
    weighted += weights[i] * channel_losses[i];
    norm += weights[i];
  }
  if (!(norm > 0.0)) throw ValidationError("total_loss: channel weights sum to zero");
  return weighted / norm;
}

double total_loss(std::span<const double> channel_losses, const ChannelWeights& weights) {
  const double all[3] = {weights.building, weights.border, weights.spacing};
  const std::size_t used = std::min<std::size_t>(channel_losses.size(), 3);
  return total_loss(channel_losses, std::span<const double>(all, used));
}

void ScheduleParams::validate() const {
  if (!(up_epochs > 0.0 && up_epochs < total_epochs)) {
    throw ValidationError("schedule needs 0 < up_epochs < total_epochs");
  }
  if (!(lr_final < lr_init && lr_init < lr_max)) {
    throw ValidationError("schedule needs lr_final < lr_init < lr_max");
  }
}

double lr_poly(double epoch, const ScheduleParams& params) {
  require_epoch(epoch, params);
  return params.poly_lr0 * std::pow(1.0 - epoch / params.total_epochs, params.poly_power);
}

double lr_poly_recursive(std::uint32_t epoch, const ScheduleParams& params) {
  require_epoch(epoch, params);
  double lr = params.poly_lr0;
  for (std::uint32_t t = 0; t < epoch; ++t) {
    lr *= std::pow(1.0 - static_cast<double>(t) / params.total_epochs, params.poly_power);
  }
  return lr;
}

double lr_one_cycle(double epoch, const ScheduleParams& params) {
  require_epoch(epoch, params);
  params.validate();
  constexpr double pi = std::numbers::pi;
  if (epoch <= params.up_epochs) {
    const double t = epoch / params.up_epochs;
    return params.lr_init + (params.lr_max - params.lr_init) * (1.0 - std::cos(pi * t)) / 2.0;
  }
  const double t = (epoch - params.up_epochs) / (params.total_epochs - params.up_epochs);
  return params.lr_final + (params.lr_max - params.lr_final) * (1.0 + std::cos(pi * t)) / 2.0;
}

Box sample_cutmix_box(std::size_t height, std::size_t width, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  const auto uniform = [&engine] {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  };
  const double lambda = uniform();
  const double side = std::sqrt(1.0 - lambda);
  const auto cut_h = static_cast<std::size_t>(std::floor(static_cast<double>(height) * side));
  const auto cut_w = static_cast<std::size_t>(std::floor(static_cast<double>(width) * side));
  const auto cy = std::min(height - 1,
                           static_cast<std::size_t>(uniform() * static_cast<double>(height)));
  const auto cx = std::min(width - 1,
                           static_cast<std::size_t>(uniform() * static_cast<double>(width)));
  const std::size_t y0 = cy >= cut_h / 2 ? cy - cut_h / 2 : 0;
  const std::size_t x0 = cx >= cut_w / 2 ? cx - cut_w / 2 : 0;
  const std::size_t y1 = std::min(height, cy + cut_h / 2);
  const std::size_t x1 = std::min(width, cx + cut_w / 2);
  return Box{y0, x0, y1 - y0, x1 - x0};
}

Sample cutmix(const Sample& a, const Sample& b, const Box& box) {
  if (!a.image.same_shape(b.image)) throw ValidationError("cutmix: image shapes differ");
  const std::size_t h = a.image.height();
  const std::size_t w = a.image.width();
  const BinaryMask* masks[] = {&a.targets.building, &a.targets.border, &a.targets.spacing,
                               &b.targets.building, &b.targets.border, &b.targets.spacing};
  for (const BinaryMask* m : masks) {
    if (m->height() != h || m->width() != w) {
      throw ValidationError("cutmix: target dimensions differ from the image");
    }
  }
  if (box.row > h || box.col > w || box.rows > h - box.row || box.cols > w - box.col) {
    throw ValidationError("cutmix: box exceeds the canvas");
  }

  Sample out = a;
  for (std::size_t y = box.row; y < box.row + box.rows; ++y) {
    for (std::size_t x = box.col; x < box.col + box.cols; ++x) {
      for (std::size_t c = 0; c < out.image.channels(); ++c) {
        out.image.at(c, y, x) = b.image.at(c, y, x);
      }
      out.targets.building(y, x) = b.targets.building(y, x);
      out.targets.border(y, x) = b.targets.border(y, x);
      out.targets.spacing(y, x) = b.targets.spacing(y, x);
    }
  }
  return out;
}

}  // namespace footprint
