#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace orchard {

// Run configuration: one key/value file captures every parameter of a batch
// run; command-line overrides win over file values.
struct PipelineConfig {
    // inputs
    std::string pmatrix_path;
    std::string offset_path;
    std::string dtm_path;
    std::string dsm_path;
    std::string rows_path;
    std::string images_dir;
    std::string annotations_dir;

    // raw drone frame geometry
    int image_width = 5472;
    int image_height = 3648;
    double focal_px = 0.0; // required by the crop planner's width heuristic

    // crop planning
    double crop_margin = 0.1;

    // anchor design
    double anchor_base_size = 256.0;
    double min_dimension = 600.0;
    double max_dimension = 1024.0;

    // detector-facing defaults carried for downstream consumers
    std::vector<double> anchor_scales{0.25, 0.5, 1.0, 2.0};
    std::vector<double> anchor_ratios{0.5, 1.0, 2.0};
    double height_stride = 16.0;
    double width_stride = 16.0;
    double nms_iou_threshold = 0.7;
    int max_box_proposals = 150;
    double momentum_gamma = 0.9;
    double learning_rate = 0.0003;

    // evaluation
    double weight_tree = 0.92;
    double weight_ground = 0.08;

    // augmentation
    double min_visible_fraction = 0.25;

    std::uint64_t seed = 0;
};

// Parses `key = value` lines; values are numbers, [number, ...] arrays or
// (optionally quoted) strings. '#' starts a comment. Unknown keys are
// rejected.
PipelineConfig parse_config(const std::string& text);

// Applies one `key=value` override on top of an existing config.
void apply_config_override(PipelineConfig& config, const std::string& assignment);

PipelineConfig load_config(const std::filesystem::path& path);

std::string write_config(const PipelineConfig& config);

} // namespace orchard
