#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "cli/config.hpp"
#include "cli/parallel.hpp"
#include "footprint/annotations.hpp"
#include "footprint/dataset.hpp"
#include "footprint/evaluation.hpp"
#include "footprint/extract.hpp"
#include "footprint/fusion.hpp"
#include "footprint/raster_io.hpp"
#include "footprint/targets.hpp"
#include "footprint/train_math.hpp"

namespace footprint::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Stage outputs are staged in memory and committed together at the end of a
// successful run, each through an atomic rename.
class Outputs {
 public:
  void add(fs::path path, std::string bytes) { files_.emplace_back(std::move(path), std::move(bytes)); }
  void set_manifest(fs::path path) { manifest_ = std::move(path); }

  void commit(const PipelineConfig& config, const std::vector<std::string>& inputs) {
    if (files_.empty()) return;
    ordered_json manifest;
    manifest["stage"] = config.stage;
    manifest["config"] = config.effective;
    manifest["config_hash"] = hex64(config.config_hash);
    manifest["inputs"] = inputs;
    manifest["outputs"] = ordered_json::array();
    for (const auto& [path, bytes] : files_) {
      manifest["outputs"].push_back(
          {{"path", path.string()}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
    }
    fs::path manifest_path = manifest_;
    if (manifest_path.empty()) {
      manifest_path = files_.front().first;
      manifest_path += ".run.json";
    }
    for (const auto& [path, bytes] : files_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
    }
    for (const auto& [path, bytes] : files_) write_file_atomic(path, bytes);
    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
  fs::path manifest_;
};

std::size_t thread_count(const StageOptions& o) {
  return o.threads == 0 ? default_thread_count() : o.threads;
}

// "dir/fold0.id.pmap" -> "fold0"
std::string id_from_path(const std::string& path) {
  const std::string name = fs::path(path).filename().string();
  return name.substr(0, name.find('.'));
}

// Inserts `.tag` before the final extension: ("a/b.pmap", "hf") -> "a/b.hf.pmap".
std::string with_tag(const std::string& path, std::string_view tag) {
  fs::path p(path);
  fs::path out = p.parent_path() / p.stem();
  out += "." + std::string(tag);
  out += p.extension();
  return out.string();
}

std::string without_extension(const std::string& path) {
  fs::path p(path);
  return (p.parent_path() / p.stem()).string();
}

bool is_geojson(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  return ext == ".geojson" || ext == ".json";
}

std::string channel_name(std::size_t c) {
  static const char* names[] = {"building", "border", "spacing"};
  return c < 3 ? names[c] : "ch" + std::to_string(c);
}

Raster<double> to_double(const Planes& planes, std::size_t channel) {
  const auto plane = planes.channel(channel);
  Raster<double> out(planes.height(), planes.width());
  for (std::size_t i = 0; i < plane.size(); ++i) out[i] = plane[i];
  return out;
}

Planes masks_to_planes(const std::vector<const BinaryMask*>& masks) {
  Planes planes(masks.size(), masks.front()->height(), masks.front()->width());
  for (std::size_t c = 0; c < masks.size(); ++c) {
    require_same_shape(*masks.front(), *masks[c], "mask stack");
    auto dst = planes.channel(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (*masks[c])[i] ? 1.0f : 0.0f;
  }
  return planes;
}

TargetStack planes_to_targets(const Planes& planes) {
  if (planes.channels() != 3) {
    throw ValidationError("target stack must have 3 channels, got " +
                          std::to_string(planes.channels()));
  }
  return TargetStack{binarize(planes, 0, 0.5f), binarize(planes, 1, 0.5f),
                     binarize(planes, 2, 0.5f)};
}

// ---------------------------------------------------------------- targets

int run_targets(const PipelineConfig& cfg, std::ostream&) {
  const StageOptions& o = cfg.options;
  const auto images = ingest_annotations(read_file(o.annotations), id_from_path(o.annotations));
  std::vector<TargetStack> stacks(images.size());
  parallel_for(images.size(), thread_count(o), [&](std::size_t i) {
    try {
      stacks[i] = assemble_targets(images[i].rings, o.height, o.width);
    } catch (const ValidationError& e) {
      throw ValidationError("image '" + images[i].image_id + "': " + e.what());
    }
  });
  Outputs outputs;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const fs::path base = fs::path(o.out_dir) / images[i].image_id;
    if (o.format == "pgm" || o.format == "both") {
      outputs.add(base.string() + ".building.pgm", encode_pgm(stacks[i].building));
      outputs.add(base.string() + ".border.pgm", encode_pgm(stacks[i].border));
      outputs.add(base.string() + ".spacing.pgm", encode_pgm(stacks[i].spacing));
    }
    if (o.format == "pmap" || o.format == "both") {
      outputs.add(base.string() + ".targets.pmap", encode_pmap(targets_to_planes(stacks[i])));
    }
  }
  outputs.set_manifest(fs::path(o.out_dir) / "targets.run.json");
  outputs.commit(cfg, {o.annotations});
  return 0;
}

// ------------------------------------------------------------------- fuse

int run_fuse(const PipelineConfig& cfg, std::ostream&) {
  const StageOptions& o = cfg.options;
  std::vector<std::string> read_paths;
  std::vector<std::vector<std::string>> fold_paths(o.inputs.size());
  for (std::size_t f = 0; f < o.inputs.size(); ++f) {
    if (o.tta) {
      for (const ViewTransform v : kAllViews) fold_paths[f].push_back(with_tag(o.inputs[f], view_suffix(v)));
    } else {
      fold_paths[f].push_back(o.inputs[f]);
    }
    read_paths.insert(read_paths.end(), fold_paths[f].begin(), fold_paths[f].end());
  }

  std::vector<ProbMap> folds(o.inputs.size());
  parallel_for(o.inputs.size(), thread_count(o), [&](std::size_t f) {
    if (!o.tta) {
      folds[f] = decode_pmap(read_file(fold_paths[f][0]));
      validate_probabilities(folds[f]);
      return;
    }
    std::vector<TaggedView> views;
    for (std::size_t v = 0; v < 4; ++v) {
      views.push_back({kAllViews[v], decode_pmap(read_file(fold_paths[f][v]))});
      validate_probabilities(views.back().map);
    }
    folds[f] = tta_average(views);
  });

  const ProbMap fused = ensemble_average(folds);
  Outputs outputs;
  outputs.add(o.out, encode_pmap(fused));
  const std::string stem = without_extension(o.out);
  const auto threshold = static_cast<float>(o.threshold);
  for (std::size_t c = 0; c < fused.channels(); ++c) {
    outputs.add(stem + "." + channel_name(c) + ".pgm", encode_pgm(binarize(fused, c, threshold)));
  }
  if (o.tta && o.keep_intermediates) {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      outputs.add(stem + ".fold" + std::to_string(f) + ".tta.pmap", encode_pmap(folds[f]));
    }
  }
  outputs.commit(cfg, read_paths);
  return 0;
}

// ---------------------------------------------------------------- extract

int run_extract(const PipelineConfig& cfg, std::ostream&) {
  const StageOptions& o = cfg.options;
  std::vector<std::string> inputs;
  Extraction result;
  std::string image_id = o.image_id;
  if (!o.inputs.empty()) {
    inputs.push_back(o.inputs.front());
    if (image_id.empty()) image_id = id_from_path(o.inputs.front());
    const ProbMap fused = decode_pmap(read_file(o.inputs.front()));
    validate_probabilities(fused);
    if (o.mode == "single") {
      result = extract_single_class_full(binarize(fused, 0, static_cast<float>(o.threshold)),
                                         o.min_area);
    } else {
      MultiClassOptions mc;
      mc.threshold = static_cast<float>(o.threshold);
      mc.min_area = o.min_area;
      mc.use_spacing = !o.no_spacing;
      result = extract_multi_class_full(fused, mc);
    }
  } else {
    if (image_id.empty()) image_id = id_from_path(o.building);
    inputs.push_back(o.building);
    const BinaryMask building = decode_pgm(read_file(o.building));
    if (o.mode == "single") {
      result = extract_single_class_full(building, o.min_area);
    } else {
      inputs.push_back(o.border);
      const BinaryMask border = decode_pgm(read_file(o.border));
      std::vector<const BinaryMask*> stack{&building, &border};
      BinaryMask spacing;
      if (!o.spacing.empty()) {
        inputs.push_back(o.spacing);
        spacing = decode_pgm(read_file(o.spacing));
        stack.push_back(&spacing);
      }
      MultiClassOptions mc;
      mc.min_area = o.min_area;
      mc.use_spacing = !o.no_spacing;
      result = extract_multi_class_full(masks_to_planes(stack), mc);
    }
  }
  result.polygons.image_id = image_id;
  Outputs outputs;
  if (!o.geojson.empty()) outputs.add(o.geojson, polygon_set_to_geojson(result.polygons));
  if (!o.imap.empty()) outputs.add(o.imap, encode_imap(result.instances));
  outputs.commit(cfg, inputs);
  return 0;
}

// ------------------------------------------------------------------- eval

struct LoadedInstances {
  std::string image_id;
  InstanceMap map;
};

LoadedInstances load_instances(const std::string& path, const StageOptions& o) {
  if (!is_geojson(path)) return {id_from_path(path), decode_imap(read_file(path))};
  const PolygonSet set = polygon_set_from_geojson(read_file(path), id_from_path(path));
  const std::size_t h = set.height ? set.height : o.height;
  const std::size_t w = set.width ? set.width : o.width;
  if (h == 0 || w == 0) {
    throw ValidationError(path + ": GeoJSON has no canvas size; pass --height/--width");
  }
  std::vector<PolygonRing> rings;
  for (const PolygonInstance& inst : set.instances) rings.push_back(inst.exterior);
  return {set.image_id, rings_to_instance_map(rings, h, w)};
}

int run_eval(const PipelineConfig& cfg, std::ostream& out) {
  const StageOptions& o = cfg.options;
  const std::size_t n = o.pred.size();
  std::vector<ImageCounts> rows(n);
  std::vector<RgbImage> maps(n);
  parallel_for(n, thread_count(o), [&](std::size_t i) {
    const LoadedInstances pred = load_instances(o.pred[i], o);
    const LoadedInstances gt = load_instances(o.gt[i], o);
    if (!pred.map.labels.same_shape(gt.map.labels)) {
      throw ValidationError(o.pred[i] + " and " + o.gt[i] + " have different canvases");
    }
    const MatchResult match = match_instances(pred.map, gt.map, o.iou);
    rows[i] = {pred.image_id, match.counts};
    if (!o.colormap.empty()) maps[i] = color_map(pred.map, gt.map, match);
  });
  const GlobalScore global = aggregate_global(rows);

  Outputs outputs;
  if (!o.report.empty()) {
    ordered_json report;
    report["per_image"] = ordered_json::array();
    for (const ImageCounts& r : rows) {
      report["per_image"].push_back({{"image_id", r.image_id},
                                     {"tp", r.counts.tp},
                                     {"fp", r.counts.fp},
                                     {"fn", r.counts.fn},
                                     {"f1_percent", f1_from_counts(r.counts)}});
    }
    report["global"] = {{"tp", global.counts.tp}, {"fp", global.counts.fp}, {"fn", global.counts.fn}};
    report["f1_percent"] = global.f1_percent;
    report["iou_threshold"] = o.iou;
    outputs.add(o.report, report.dump(2) + "\n");
  }
  if (!o.csv.empty()) outputs.add(o.csv, export_per_image_csv(rows));
  if (!o.colormap.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string path = n == 1 ? o.colormap : with_tag(o.colormap, rows[i].image_id);
      outputs.add(path, encode_ppm(maps[i]));
    }
  }
  std::vector<std::string> inputs = o.pred;
  inputs.insert(inputs.end(), o.gt.begin(), o.gt.end());
  outputs.commit(cfg, inputs);
  out << "tp=" << global.counts.tp << " fp=" << global.counts.fp << " fn=" << global.counts.fn
      << " f1_percent=" << std::setprecision(6) << global.f1_percent << "\n";
  return 0;
}

// ----------------------------------------------------------- tile / split

Planes load_source_raster(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.starts_with("PMAP1\n")) return decode_pmap(bytes);
  // Raw 8-bit PGM: keep the sample values rather than the binary mapping.
  const BinaryMask header_check = decode_pgm(bytes);
  Planes planes(1, header_check.height(), header_check.width());
  const std::size_t offset = bytes.size() - planes.plane_size();
  for (std::size_t i = 0; i < planes.plane_size(); ++i) {
    planes.values()[i] = static_cast<float>(static_cast<unsigned char>(bytes[offset + i]));
  }
  return planes;
}

int run_tile(const PipelineConfig& cfg, std::ostream&) {
  const StageOptions& o = cfg.options;
  const Planes source = load_source_raster(o.source);
  std::vector<TileRecord> tiles = tile_index(source.height(), source.width(), o.size, nullptr);
  const BlankProbe probe = nodata_probe(source, static_cast<float>(o.nodata));
  parallel_for(tiles.size(), thread_count(o), [&](std::size_t i) { tiles[i].blank = probe(tiles[i]); });
  Outputs outputs;
  outputs.add(o.index, tile_index_to_json(tiles));
  outputs.commit(cfg, {o.source});
  return 0;
}

int run_split(const PipelineConfig& cfg, std::ostream&) {
  const StageOptions& o = cfg.options;
  const auto tiles = kfold_assign(tile_index_from_json(read_file(o.index)), o.k);
  Outputs outputs;
  outputs.add(o.out.empty() ? o.index : o.out, tile_index_to_json(tiles));
  outputs.commit(cfg, {o.index});
  return 0;
}

// --------------------------------------------------------------- lossmath

LossParams loss_params(const StageOptions& o) {
  LossParams p;
  p.beta = o.beta;
  p.eps = o.eps;
  p.gamma1 = o.gamma1;
  p.gamma2 = o.gamma2;
  return p;
}

void print_scalar(std::ostream& out, double v) { out << std::setprecision(9) << v << "\n"; }

int run_lossmath(const PipelineConfig& cfg, std::ostream& out) {
  const StageOptions& o = cfg.options;
  const std::string which = cfg.stage.substr(std::string("lossmath ").size());
  const LossParams params = loss_params(o);

  if (which == "gradcheck") {
    std::mt19937_64 engine(o.seed);
    const auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
    constexpr double kStep = 1e-5;
    double worst = 0.0;
    for (std::size_t c = 0; c < o.cases; ++c) {
      Raster<double> pred(o.grid, o.grid);
      BinaryMask gt(o.grid, o.grid);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        pred[i] = 0.05 + 0.9 * uniform();
        gt[i] = uniform() < 0.5 ? 1 : 0;
      }
      const auto eval = [&](const Raster<double>& p) {
        if (o.loss == "dice") return dice_loss(p, gt, params);
        if (o.loss == "bce") return bce_loss(p, gt, params);
        return channel_loss(p, gt, params);
      };
      const LossResult analytic = eval(pred);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        Raster<double> plus = pred;
        Raster<double> minus = pred;
        plus[i] += kStep;
        minus[i] -= kStep;
        const double numeric = (eval(plus).value - eval(minus).value) / (2.0 * kStep);
        const double a = analytic.gradient[i];
        const double scale = std::max({std::fabs(a), std::fabs(numeric), 1e-300});
        worst = std::max(worst, std::fabs(a - numeric) / scale);
      }
    }
    print_scalar(out, worst);
    return 0;
  }

  const Planes pred_map = decode_pmap(read_file(o.pred_map));
  validate_probabilities(pred_map);
  std::vector<BinaryMask> gts;
  for (const std::string& path : o.gt) gts.push_back(decode_pgm(read_file(path)));

  if (which == "total") {
    if (gts.size() != pred_map.channels()) {
      throw ValidationError("total: " + std::to_string(pred_map.channels()) +
                            " prediction channels but " + std::to_string(gts.size()) +
                            " ground-truth masks");
    }
    std::vector<double> losses;
    for (std::size_t c = 0; c < gts.size(); ++c) {
      losses.push_back(channel_loss(to_double(pred_map, c), gts[c], params).value);
    }
    print_scalar(out, total_loss(losses, o.weights));
    return 0;
  }

  if (gts.size() != 1) throw ValidationError(which + " takes exactly one --gt mask");
  const Raster<double> pred = to_double(pred_map, o.channel);
  double value = 0.0;
  if (which == "dice") value = dice_loss(pred, gts[0], params).value;
  if (which == "bce") value = bce_loss(pred, gts[0], params).value;
  if (which == "channel") value = channel_loss(pred, gts[0], params).value;
  print_scalar(out, value);
  return 0;
}

// --------------------------------------------------------------------- lr

int run_lr(const PipelineConfig& cfg, std::ostream& out) {
  const StageOptions& o = cfg.options;
  ScheduleParams params;
  params.total_epochs = o.total_epochs;
  params.up_epochs = o.up_epochs;
  std::ostringstream csv;
  csv << "epoch,lr\n" << std::setprecision(9);
  const auto last = static_cast<std::uint32_t>(std::floor(o.total_epochs));
  for (std::uint32_t e = 0; e <= last; ++e) {
    double lr = 0.0;
    if (o.schedule == "onecycle") {
      lr = lr_one_cycle(e, params);
    } else {
      lr = o.recursive ? lr_poly_recursive(e, params) : lr_poly(e, params);
    }
    csv << e << "," << lr << "\n";
  }
  if (o.out.empty()) {
    out << csv.str();
    return 0;
  }
  Outputs outputs;
  outputs.add(o.out, csv.str());
  outputs.commit(cfg, {});
  return 0;
}

// ----------------------------------------------------------------- cutmix

int run_cutmix(const PipelineConfig& cfg, std::ostream& out) {
  const StageOptions& o = cfg.options;
  const Sample a{decode_pmap(read_file(o.a_image)), planes_to_targets(decode_pmap(read_file(o.a_targets)))};
  const Sample b{decode_pmap(read_file(o.b_image)), planes_to_targets(decode_pmap(read_file(o.b_targets)))};
  const Box box = o.box.empty() ? sample_cutmix_box(a.image.height(), a.image.width(), o.seed)
                                : Box{o.box[0], o.box[1], o.box[2], o.box[3]};
  const Sample mixed = cutmix(a, b, box);
  Outputs outputs;
  outputs.add(o.out_image, encode_pmap(mixed.image));
  outputs.add(o.out_targets, encode_pmap(targets_to_planes(mixed.targets)));
  outputs.commit(cfg, {o.a_image, o.a_targets, o.b_image, o.b_targets});
  out << "box=" << box.row << "," << box.col << "," << box.rows << "," << box.cols << "\n";
  return 0;
}

}  // namespace

int run_stage(const PipelineConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const std::string& s = config.stage;
    if (s == "targets") return run_targets(config, out);
    if (s == "fuse") return run_fuse(config, out);
    if (s == "extract") return run_extract(config, out);
    if (s == "eval") return run_eval(config, out);
    if (s == "tile") return run_tile(config, out);
    if (s == "split") return run_split(config, out);
    if (s.starts_with("lossmath ")) return run_lossmath(config, out);
    if (s == "lr") return run_lr(config, out);
    if (s == "cutmix") return run_cutmix(config, out);
    err << "error: unknown stage '" << s << "'\n";
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  PipelineConfig config;
  try {
    config = parse_invocation(args);
  } catch (const HelpRequested& help) {
    out << help.what();
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }
  return run_stage(config, out, err);
}

}  // namespace footprint::cli
