#include "footprint/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace footprint {
namespace {

void require_same_canvas(const InstanceMap& a, const InstanceMap& b, const char* what) {
  if (!a.labels.same_shape(b.labels)) {
    throw ValidationError(std::string(what) + ": prediction and ground truth canvases differ");
  }
}

std::vector<std::uint64_t> label_areas(const InstanceMap& map) {
  std::vector<std::uint64_t> area(static_cast<std::size_t>(map.max_label) + 1, 0);
  for (const std::uint32_t id : map.labels.values()) {
    if (id > map.max_label) throw ValidationError("label exceeds max_label");
    ++area[id];
  }
  return area;
}

// Each id in 1..max_label must be claimed exactly once by pairs or the
// unmatched list.
void require_partition(std::uint32_t max_label, const std::vector<std::uint32_t>& paired,
                       const std::vector<std::uint32_t>& unmatched, const char* side) {
  std::vector<int> seen(static_cast<std::size_t>(max_label) + 1, 0);
  for (const auto* list : {&paired, &unmatched}) {
    for (const std::uint32_t id : *list) {
      if (id == 0 || id > max_label) {
        throw ValidationError(std::string("color_map: ") + side + " id " + std::to_string(id) +
                              " not present in the instance map");
      }
      ++seen[id];
    }
  }
  for (std::uint32_t id = 1; id <= max_label; ++id) {
    if (seen[id] != 1) {
      throw ValidationError(std::string("color_map: ") + side + " id " + std::to_string(id) +
                            " is not classified exactly once");
    }
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

PixelScores pixel_scores(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt, "pixel_scores");
  PixelScores s;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0;
    const bool g = gt[i] != 0;
    s.counts.tp += p && g;
    s.counts.fp += p && !g;
    s.counts.fn += !p && g;
  }
  const auto tp = static_cast<double>(s.counts.tp);
  const auto fp = static_cast<double>(s.counts.fp);
  const auto fn = static_cast<double>(s.counts.fn);
  if (tp + fp + fn == 0.0) return s;
  s.precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
  s.recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  s.fscore = 2.0 * tp / (2.0 * tp + fp + fn);
  s.iou = tp / (tp + fp + fn);
  return s;
}

double instance_iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "instance_iou");
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  if (uni == 0) throw ValidationError("instance_iou: both pixel sets are empty");
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<MatchPair> overlapping_pairs(const InstanceMap& pred, const InstanceMap& gt) {
  require_same_canvas(pred, gt, "overlapping_pairs");
  const auto pred_area = label_areas(pred);
  const auto gt_area = label_areas(gt);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> inter;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    const std::uint32_t p = pred.labels[i];
    const std::uint32_t g = gt.labels[i];
    if (p && g) ++inter[{p, g}];
  }
  std::vector<MatchPair> pairs;
  pairs.reserve(inter.size());
  for (const auto& [key, overlap] : inter) {
    const std::uint64_t uni = pred_area[key.first] + gt_area[key.second] - overlap;
    pairs.push_back({key.first, key.second,
                     static_cast<double>(overlap) / static_cast<double>(uni)});
  }
  return pairs;
}

MatchResult match_instances(const InstanceMap& pred, const InstanceMap& gt,
                            double iou_threshold) {
  std::vector<MatchPair> candidates = overlapping_pairs(pred, gt);
  std::erase_if(candidates, [&](const MatchPair& m) { return m.iou < iou_threshold; });
  std::sort(candidates.begin(), candidates.end(), [](const MatchPair& a, const MatchPair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred_id != b.pred_id) return a.pred_id < b.pred_id;
    return a.gt_id < b.gt_id;
  });

  std::vector<bool> pred_used(static_cast<std::size_t>(pred.max_label) + 1, false);
  std::vector<bool> gt_used(static_cast<std::size_t>(gt.max_label) + 1, false);
  MatchResult result;
  for (const MatchPair& m : candidates) {
    if (pred_used[m.pred_id] || gt_used[m.gt_id]) continue;
    pred_used[m.pred_id] = true;
    gt_used[m.gt_id] = true;
    result.pairs.push_back(m);
  }
  for (std::uint32_t id = 1; id <= pred.max_label; ++id) {
    if (!pred_used[id]) result.unmatched_pred.push_back(id);
  }
  for (std::uint32_t id = 1; id <= gt.max_label; ++id) {
    if (!gt_used[id]) result.unmatched_gt.push_back(id);
  }
  result.counts = {result.pairs.size(), result.unmatched_pred.size(),
                   result.unmatched_gt.size()};
  return result;
}

double f1_from_counts(const EvalCounts& c) {
  if (c.tp == 0 && c.fp == 0 && c.fn == 0) return 100.0;
  const auto tp = static_cast<double>(c.tp);
  return 100.0 * 2.0 * tp / (2.0 * tp + static_cast<double>(c.fp) + static_cast<double>(c.fn));
}

GlobalScore aggregate_global(const std::vector<ImageCounts>& per_image) {
  GlobalScore g;
  for (const ImageCounts& row : per_image) g.counts += row.counts;
  g.f1_percent = f1_from_counts(g.counts);
  return g;
}

RgbImage color_map(const InstanceMap& pred, const InstanceMap& gt, const MatchResult& match) {
  require_same_canvas(pred, gt, "color_map");
  std::vector<std::uint32_t> paired_pred;
  std::vector<std::uint32_t> paired_gt;
  for (const MatchPair& m : match.pairs) {
    paired_pred.push_back(m.pred_id);
    paired_gt.push_back(m.gt_id);
  }
  require_partition(pred.max_label, paired_pred, match.unmatched_pred, "prediction");
  require_partition(gt.max_label, paired_gt, match.unmatched_gt, "ground truth");

  std::vector<bool> pred_tp(static_cast<std::size_t>(pred.max_label) + 1, false);
  std::vector<bool> gt_fn(static_cast<std::size_t>(gt.max_label) + 1, false);
  for (const std::uint32_t id : paired_pred) pred_tp[id] = true;
  for (const std::uint32_t id : match.unmatched_gt) gt_fn[id] = true;

  RgbImage image{Raster<std::array<std::uint8_t, 3>>(pred.height(), pred.width())};
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    std::array<std::uint8_t, 3> rgb{0, 0, 0};
    const std::uint32_t p = pred.labels[i];
    const std::uint32_t g = gt.labels[i];
    if (p) (pred_tp[p] ? rgb[0] : rgb[1]) = 255;
    if (g && gt_fn[g]) rgb[2] = 255;
    image.pixels[i] = rgb;
  }
  return image;
}

std::string export_per_image_csv(const std::vector<ImageCounts>& rows) {
  std::string out = "image_id,tp,fp,fn\n";
  for (const ImageCounts& r : rows) {
    out += csv_field(r.image_id) + "," + std::to_string(r.counts.tp) + "," +
           std::to_string(r.counts.fp) + "," + std::to_string(r.counts.fn) + "\n";
  }
  return out;
}

std::vector<ImageCounts> parse_per_image_csv(std::string_view text) {
  std::vector<ImageCounts> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ValidationError("per-image CSV line " + std::to_string(line_no) + ": " + why);
  };
  while (pos < text.size()) {
    ++line_no;
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (quoted) {
        if (c == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            fields.back() += '"';
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          fields.back() += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.emplace_back();
      } else if (c == '\n') {
        ++pos;
        break;
      } else if (c != '\r') {
        fields.back() += c;
      }
    }
    if (line_no == 1) {
      if (fields != std::vector<std::string>{"image_id", "tp", "fp", "fn"}) fail("bad header");
      continue;
    }
    if (fields.size() != 4) fail("expected 4 fields");
    ImageCounts row{fields[0], {}};
    std::uint64_t* dst[] = {&row.counts.tp, &row.counts.fp, &row.counts.fn};
    for (int k = 0; k < 3; ++k) {
      const std::string& f = fields[static_cast<std::size_t>(k) + 1];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), *dst[k]);
      if (ec != std::errc() || ptr != f.data() + f.size()) fail("bad count '" + f + "'");
    }
    rows.push_back(std::move(row));
  }
  if (line_no == 0) throw ValidationError("per-image CSV: missing header");
  return rows;
}

}  // namespace footprint
