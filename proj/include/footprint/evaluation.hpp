#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "footprint/raster.hpp"
#include "footprint/raster_io.hpp"

namespace footprint {

struct EvalCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  EvalCounts& operator+=(const EvalCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const EvalCounts&) const = default;
};

struct PixelScores {
  EvalCounts counts;
  double precision = 1.0;
  double recall = 1.0;
  double fscore = 1.0;
  double iou = 1.0;
};

/// Pixelwise scores. An empty prediction of an empty target scores 1 on
/// every ratio.
PixelScores pixel_scores(const BinaryMask& pred, const BinaryMask& gt);

/// |a & b| / |a | b| over two pixel sets on the same canvas.
double instance_iou(const BinaryMask& a, const BinaryMask& b);

struct MatchPair {
  std::uint32_t pred_id = 0;
  std::uint32_t gt_id = 0;
  double iou = 0.0;
  bool operator==(const MatchPair&) const = default;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  EvalCounts counts;
  std::vector<std::uint32_t> unmatched_pred;  // false positives
  std::vector<std::uint32_t> unmatched_gt;    // false negatives
};

inline constexpr double kDefaultMatchIou = 0.5;

/// IoU between every overlapping (pred, gt) instance pair, from one pass
/// over the canvas. Pairs are sorted by (pred id, gt id).
std::vector<MatchPair> overlapping_pairs(const InstanceMap& pred, const InstanceMap& gt);

/// Greedy one-to-one matching: candidates with IoU >= threshold are taken in
/// descending IoU order, ties broken by smaller pred id then smaller gt id.
MatchResult match_instances(const InstanceMap& pred, const InstanceMap& gt,
                            double iou_threshold = kDefaultMatchIou);

/// Object F1 in percent; 100 when all counts are zero.
double f1_from_counts(const EvalCounts& counts);

struct ImageCounts {
  std::string image_id;
  EvalCounts counts;
  bool operator==(const ImageCounts&) const = default;
};

struct GlobalScore {
  EvalCounts counts;
  double f1_percent = 100.0;
};

/// Sums counts over images (in the given order) and scores the sum.
GlobalScore aggregate_global(const std::vector<ImageCounts>& per_image);

/// Red marks pixels of matched predictions, green unmatched predictions,
/// blue unmatched ground truth; overlaps mix (cyan = G+B, magenta = R+B).
RgbImage color_map(const InstanceMap& pred, const InstanceMap& gt, const MatchResult& match);

/// CSV with header `image_id,tp,fp,fn`, one row per image in input order.
std::string export_per_image_csv(const std::vector<ImageCounts>& rows);
std::vector<ImageCounts> parse_per_image_csv(std::string_view text);

}  // namespace footprint
