#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "orchard/geometry.hpp"
#include "orchard/terrain.hpp"

namespace orchard {

struct TreeSighting {
    std::string tree_id;
    std::string image_name;
    PixelPoint base_px;
    PixelPoint top_px;
    double depth = 0.0; // projection depth of the base, metres
};

// A tree is sighted when both its base and top project in front of the camera
// and inside [0, W) x [0, H).
std::vector<TreeSighting> visible_trees(const CameraModel& model, const std::string& image_name,
                                        std::span<const TreeRecord> trees);

struct CropRect {
    std::string tree_id;
    std::string image_name;
    int xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};

struct CropPlanParams {
    double focal_px = 1.0;  // focal length used for the width heuristic
    double margin = 0.1;    // inflation fraction
    int image_width = 5472; // raw drone frame size
    int image_height = 3648;
};

// Crop extent: vertically the [top, base] pixel span grown by margin*height
// per side; horizontally spacing*focal/depth pixels around the trunk midline,
// grown to (1+margin) of that width. Clamped to image bounds and rounded
// outward. Throws degenerate_crop when the result is empty.
CropRect plan_crop(const TreeSighting& sighting, double spacing, const CropPlanParams& params);

struct CropManifest {
    std::vector<CropRect> crops;          // one entry per assigned tree
    std::vector<std::string> missing;     // trees sighted in no image
    std::vector<std::string> degenerate;  // trees whose assigned crop was empty
};

// Assigns each tree to the first image, in the given (canonically sorted)
// order, where it is sighted; later sightings are dropped. `plan` maps the
// chosen sighting to a crop and may throw degenerate_crop.
CropManifest dedup_assign(std::span<const std::string> images,
                          std::span<const TreeSighting> sightings,
                          std::span<const std::string> all_tree_ids,
                          const std::function<CropRect(const TreeSighting&)>& plan);

std::string write_crop_manifest_csv(const CropManifest& manifest);
std::string write_missing_list(const CropManifest& manifest);

} // namespace orchard
