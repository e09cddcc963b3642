#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "footprint/raster.hpp"

namespace footprint::cli {

/// Bad flags, bad config keys, or out-of-range values. Exit status 1.
class UsageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Every parameter any stage accepts; each subcommand binds its own subset.
struct StageOptions {
  std::size_t threads = 0;  // 0 = logical CPU count

  // Shared inputs / outputs.
  std::vector<std::string> inputs;
  std::string out;
  std::string out_dir;
  std::string image_id;
  std::size_t height = 0;
  std::size_t width = 0;

  // targets
  std::string annotations;
  std::string format = "pgm";

  // fuse / extract
  double threshold = 0.3;
  bool tta = false;
  bool keep_intermediates = false;
  std::string mode = "multi";
  std::size_t min_area = 140;
  bool no_spacing = false;
  std::string building;
  std::string border;
  std::string spacing;
  std::string geojson;
  std::string imap;

  // eval
  std::vector<std::string> pred;
  std::vector<std::string> gt;
  double iou = 0.5;
  std::string colormap;
  std::string csv;
  std::string report;

  // tile / split
  std::string source;
  std::size_t size = 1024;
  double nodata = 0.0;
  std::string index;
  std::uint32_t k = 5;

  // lossmath
  std::string pred_map;
  std::size_t channel = 0;
  double beta = 1.0;
  double eps = 1e-4;
  double gamma1 = 0.5;
  double gamma2 = 0.5;
  std::vector<double> weights{1.0, 2.0, 2.0};
  std::size_t cases = 50;
  std::size_t grid = 16;
  std::string loss = "channel";

  // lr
  std::string schedule = "onecycle";
  bool recursive = false;
  double total_epochs = 100.0;
  double up_epochs = 40.0;

  // cutmix
  std::string a_image;
  std::string a_targets;
  std::string b_image;
  std::string b_targets;
  std::vector<std::size_t> box;
  std::string out_image;
  std::string out_targets;

  // Randomized operations (cutmix sampling, gradcheck cases).
  std::uint64_t seed = 0;
  bool seed_given = false;
};

struct PipelineConfig {
  std::string stage;  // "extract", "lossmath dice", ...
  StageOptions options;
  /// Effective parameters keyed by flag name; thread count excluded since it
  /// never changes an output.
  nlohmann::ordered_json effective;
  std::uint64_t config_hash = 0;
};

/// Defaults < config file (--config, JSON keyed by flag name) < flags.
/// Throws UsageError on unknown flags/keys, malformed values and range
/// violations. A help request throws HelpRequested carrying the text.
PipelineConfig parse_invocation(const std::vector<std::string>& args);

class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text) : text_(std::move(text)) {}
  const char* what() const noexcept override { return text_.c_str(); }

 private:
  std::string text_;
};

/// 64-bit FNV-1a; stable across platforms, used for config and artifact
/// digests in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t v);

/// Runs the configured stage. Returns 0 on success, 1 on validation errors,
/// 2 on I/O errors; diagnostics go to `err`, scalar results to `out`.
int run_stage(const PipelineConfig& config, std::ostream& out, std::ostream& err);

/// parse_invocation + run_stage with exit-status mapping.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace footprint::cli
