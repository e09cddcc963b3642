#include "cli/config.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "footprint/raster_io.hpp"

namespace footprint::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

// Options of one leaf subcommand together with accessors that report their
// effective (post-merge) values.
struct LeafSpec {
  CLI::App* app = nullptr;
  std::string stage;
  std::vector<std::pair<std::string, std::function<ordered_json()>>> fields;
  CLI::Option* config = nullptr;
  CLI::Option* seed = nullptr;
};

class Binder {
 public:
  explicit Binder(LeafSpec& leaf) : leaf_(leaf) {}

  template <class T>
  CLI::Option* option(const std::string& name, T& ref, const std::string& help) {
    CLI::Option* opt = leaf_.app->add_option("--" + name, ref, help);
    leaf_.fields.emplace_back(name, [&ref] { return ordered_json(ref); });
    return opt;
  }

  CLI::Option* flag(const std::string& name, bool& ref, const std::string& help) {
    CLI::Option* opt = leaf_.app->add_flag("--" + name, ref, help);
    leaf_.fields.emplace_back(name, [&ref] { return ordered_json(ref); });
    return opt;
  }

 private:
  LeafSpec& leaf_;
};

LeafSpec& add_leaf(CLI::App& parent, std::vector<LeafSpec>& leaves, const std::string& name,
                   const std::string& stage, const std::string& help, StageOptions& o) {
  LeafSpec leaf;
  leaf.app = parent.add_subcommand(name, help);
  leaf.stage = stage;
  leaf.config = leaf.app->add_option("--config", "JSON file of flag values (flags win)");
  leaf.app->add_option("--threads", o.threads, "worker threads (default: logical CPUs)");
  leaves.push_back(std::move(leaf));
  return leaves.back();
}

void build_app(CLI::App& app, std::vector<LeafSpec>& leaves, StageOptions& o) {
  app.require_subcommand(1);
  leaves.reserve(16);

  {
    LeafSpec& leaf = add_leaf(app, leaves, "targets", "targets",
                              "building/border/spacing masks from polygon annotations", o);
    Binder b(leaf);
    b.option("annotations", o.annotations, "annotation JSON or GeoJSON")->required();
    b.option("height", o.height, "canvas height in pixels")->required();
    b.option("width", o.width, "canvas width in pixels")->required();
    b.option("out-dir", o.out_dir, "output directory")->required();
    b.option("format", o.format, "pgm | pmap | both");
  }
  {
    LeafSpec& leaf = add_leaf(app, leaves, "fuse", "fuse",
                              "average fold outputs (and TTA views), then binarize", o);
    Binder b(leaf);
    b.option("inputs", o.inputs, "PMAP1 fold outputs (base names with --tta)")->required();
    b.option("out", o.out, "fused PMAP1 path")->required();
    b.option("threshold", o.threshold, "binarization threshold");
    b.flag("tta", o.tta, "each input is a .id/.hf/.vf/.r180 quadruple");
    b.flag("keep-intermediates", o.keep_intermediates, "write per-fold TTA averages");
  }
  {
    LeafSpec& leaf = add_leaf(app, leaves, "extract", "extract",
                              "building instances and polygons from fused masks", o);
    Binder b(leaf);
    b.option("mode", o.mode, "single | multi");
    b.option("inputs", o.inputs, "fused PMAP1 (alternative to PGM masks)");
    b.option("building", o.building, "building mask PGM");
    b.option("border", o.border, "border mask PGM");
    b.option("spacing", o.spacing, "spacing mask PGM");
    b.option("min-area", o.min_area, "minimum instance area in pixels");
    b.option("threshold", o.threshold, "binarization threshold");
    b.flag("no-spacing", o.no_spacing, "ignore the spacing channel");
    b.option("image-id", o.image_id, "identifier stored in the GeoJSON");
    b.option("geojson", o.geojson, "output GeoJSON path");
    b.option("imap", o.imap, "output IMAP1 path");
  }
  {
    LeafSpec& leaf = add_leaf(app, leaves, "eval", "eval", "object-level scoring", o);
    Binder b(leaf);
    b.option("pred", o.pred, "prediction GeoJSON or IMAP1 files")->required();
    b.option("gt", o.gt, "ground-truth GeoJSON or IMAP1 files (same order)")->required();
    b.option("iou", o.iou, "IoU threshold for a match");
    b.option("height", o.height, "canvas height for GeoJSON without dimensions");
    b.option("width", o.width, "canvas width for GeoJSON without dimensions");
    b.option("colormap", o.colormap, "TP/FP/FN color map PPM");
    b.option("csv", o.csv, "per-image counts CSV");
    b.option("report", o.report, "JSON report");
  }
  {
    LeafSpec& leaf = add_leaf(app, leaves, "tile", "tile", "grid tile index of a source raster", o);
    Binder b(leaf);
    b.option("source", o.source, "source raster (PGM or PMAP1)")->required();
    b.option("size", o.size, "tile side in pixels");
    b.option("nodata", o.nodata, "value marking missing data");
    b.option("index", o.index, "output tile index JSON")->required();
  }
  {
    LeafSpec& leaf = add_leaf(app, leaves, "split", "split", "row-balanced k-fold assignment", o);
    Binder b(leaf);
    b.option("index", o.index, "tile index JSON")->required();
    b.option("k", o.k, "number of folds");
    b.option("out", o.out, "output index (default: rewrite --index)");
  }
  {
    CLI::App* lossmath = app.add_subcommand("lossmath", "loss values and gradient checks");
    lossmath->require_subcommand(1);
    for (const char* name : {"dice", "bce", "channel", "total"}) {
      LeafSpec& leaf = add_leaf(*lossmath, leaves, name, std::string("lossmath ") + name,
                                std::string(name) + " loss of a PMAP1 prediction", o);
      Binder b(leaf);
      b.option("pred", o.pred_map, "prediction PMAP1")->required();
      b.option("gt", o.gt, "ground-truth PGM (one per channel for total)")->required();
      if (std::string(name) != "total") b.option("channel", o.channel, "prediction channel");
      b.option("beta", o.beta, "Dice beta");
      b.option("eps", o.eps, "Dice epsilon");
      b.option("gamma1", o.gamma1, "BCE weight in the channel loss");
      b.option("gamma2", o.gamma2, "Dice weight in the channel loss");
      if (std::string(name) == "total") {
        b.option("weights", o.weights, "per-channel weights")->delimiter(',');
      }
    }
    LeafSpec& leaf = add_leaf(*lossmath, leaves, "gradcheck", "lossmath gradcheck",
                              "max relative error of analytic vs finite-difference gradients", o);
    Binder b(leaf);
    b.option("loss", o.loss, "dice | bce | channel");
    b.option("cases", o.cases, "random cases");
    b.option("grid", o.grid, "side of each random case");
    leaf.seed = b.option("seed", o.seed, "random seed");
  }
  {
    LeafSpec& leaf = add_leaf(app, leaves, "lr", "lr", "learning-rate schedule as CSV", o);
    Binder b(leaf);
    b.option("schedule", o.schedule, "poly | onecycle");
    b.flag("recursive", o.recursive, "recursive poly variant");
    b.option("total-epochs", o.total_epochs, "total epochs");
    b.option("up-epochs", o.up_epochs, "one-cycle warm-up epochs");
    b.option("out", o.out, "CSV path (default: stdout)");
  }
  {
    LeafSpec& leaf = add_leaf(app, leaves, "cutmix", "cutmix", "paste a box of sample B into A", o);
    Binder b(leaf);
    b.option("a-image", o.a_image, "sample A image PMAP1")->required();
    b.option("a-targets", o.a_targets, "sample A 3-channel targets PMAP1")->required();
    b.option("b-image", o.b_image, "sample B image PMAP1")->required();
    b.option("b-targets", o.b_targets, "sample B 3-channel targets PMAP1")->required();
    b.option("box", o.box, "row,col,rows,cols")->delimiter(',')->expected(4);
    leaf.seed = b.option("seed", o.seed, "seed for random box sampling");
    b.option("out-image", o.out_image, "mixed image PMAP1")->required();
    b.option("out-targets", o.out_targets, "mixed targets PMAP1")->required();
  }
}

std::string json_to_arg(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw UsageError("config value " + v.dump() + " is not a string, number or boolean");
}

void apply_config_file(const LeafSpec& leaf) {
  const std::string path = leaf.config->as<std::string>();
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config " + path + ": top level must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") throw UsageError("config " + path + ": nested config not allowed");
    CLI::Option* opt = leaf.app->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw UsageError("config " + path + ": unknown key '" + key + "' for " + leaf.stage);
    }
    if (opt->count() > 0) continue;  // flag on the command line wins
    if (value.is_array()) {
      for (const auto& item : value) opt->add_result(json_to_arg(item));
    } else {
      opt->add_result(json_to_arg(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config " + path + ": key '" + key + "': " + e.what());
    }
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void validate(const std::string& stage, const StageOptions& o) {
  require(o.threshold >= 0.0 && o.threshold <= 1.0, "--threshold must lie in [0, 1]");
  require(o.iou > 0.0 && o.iou <= 1.0, "--iou must lie in (0, 1]");
  require(o.k >= 2, "--k must be >= 2");
  require(o.size >= 1, "--size must be >= 1");
  if (stage == "targets") {
    require(o.height >= 1 && o.width >= 1, "--height and --width must be >= 1");
    require(o.format == "pgm" || o.format == "pmap" || o.format == "both",
            "--format must be pgm, pmap or both");
  }
  if (stage == "extract") {
    require(o.mode == "single" || o.mode == "multi", "--mode must be single or multi");
    require(o.inputs.size() <= 1, "extract takes at most one --inputs map");
    require(!o.inputs.empty() || !o.building.empty(),
            "extract needs --inputs <fused.pmap> or --building <mask.pgm>");
    require(o.inputs.empty() || (o.building.empty() && o.border.empty() && o.spacing.empty()),
            "--inputs conflicts with --building/--border/--spacing");
    require(o.mode == "single" || !o.inputs.empty() || !o.border.empty(),
            "multi mode with PGM inputs needs --border");
    require(!o.geojson.empty() || !o.imap.empty(), "extract needs --geojson and/or --imap");
  }
  if (stage == "eval") {
    require(o.pred.size() == o.gt.size(), "--pred and --gt need the same number of files");
  }
  if (stage.starts_with("lossmath")) {
    require(o.eps > 0.0, "--eps must be > 0");
    require(o.gamma1 >= 0.0 && o.gamma2 >= 0.0 && o.gamma1 + o.gamma2 > 0.0,
            "--gamma1/--gamma2 must be >= 0 with a positive sum");
    require(o.loss == "dice" || o.loss == "bce" || o.loss == "channel",
            "--loss must be dice, bce or channel");
    require(o.cases >= 1 && o.grid >= 1, "--cases and --grid must be >= 1");
    for (const double w : o.weights) require(w >= 0.0, "--weights must be >= 0");
  }
  if (stage == "lossmath gradcheck") {
    require(o.seed_given, "gradcheck needs --seed (random cases must be seeded)");
  }
  if (stage == "lr") {
    require(o.schedule == "poly" || o.schedule == "onecycle",
            "--schedule must be poly or onecycle");
    require(o.total_epochs >= 1.0, "--total-epochs must be >= 1");
    require(o.up_epochs > 0.0 && o.up_epochs < o.total_epochs,
            "--up-epochs must lie in (0, total-epochs)");
    require(!o.recursive || o.schedule == "poly", "--recursive applies to the poly schedule");
  }
  if (stage == "cutmix") {
    require(o.box.empty() || o.box.size() == 4, "--box takes row,col,rows,cols");
    require(!o.box.empty() || o.seed_given,
            "cutmix needs --box or --seed (random boxes must be seeded)");
    require(o.box.empty() || !o.seed_given, "--box conflicts with --seed");
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

PipelineConfig parse_invocation(const std::vector<std::string>& args) {
  StageOptions options;
  std::vector<LeafSpec> leaves;
  CLI::App app("Building footprint extraction and evaluation toolkit", "footprint");
  build_app(app, leaves, options);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::string text = app.help();
    for (const LeafSpec& leaf : leaves) {
      if (leaf.app->parsed()) text = leaf.app->help();
    }
    throw HelpRequested(text);
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const LeafSpec* selected = nullptr;
  for (const LeafSpec& leaf : leaves) {
    if (leaf.app->parsed()) selected = &leaf;
  }
  if (selected == nullptr) throw UsageError("no stage selected");
  if (selected->config->count() > 0) apply_config_file(*selected);
  options.seed_given = selected->seed != nullptr && selected->seed->count() > 0;
  validate(selected->stage, options);

  PipelineConfig config;
  config.stage = selected->stage;
  config.effective = ordered_json::object();
  config.effective["stage"] = selected->stage;
  for (const auto& [name, get] : selected->fields) config.effective[name] = get();
  config.config_hash = fnv1a64(config.effective.dump());
  config.options = std::move(options);
  return config;
}

}  // namespace footprint::cli
