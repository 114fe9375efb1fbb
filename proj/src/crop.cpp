#include "orchard/crop.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "orchard/util.hpp"

namespace orchard {

std::vector<TreeSighting> visible_trees(const CameraModel& model, const std::string& image_name,
                                        std::span<const TreeRecord> trees) {
    double width = model_image_width(model);
    double height = model_image_height(model);
    auto in_bounds = [&](const PixelPoint& p) {
        return p.u >= 0.0 && p.u < width && p.v >= 0.0 && p.v < height;
    };

    std::vector<TreeSighting> sightings;
    for (const TreeRecord& tree : trees) {
        auto base = try_project(tree.base, model);
        if (!base || !in_bounds(base->pixel)) continue;
        auto top = try_project(tree.top, model);
        if (!top || !in_bounds(top->pixel)) continue;
        sightings.push_back(TreeSighting{tree.tree_id, image_name, base->pixel, top->pixel,
                                         base->depth});
    }
    return sightings;
}

CropRect plan_crop(const TreeSighting& sighting, double spacing, const CropPlanParams& params) {
    double vmin = std::min(sighting.top_px.v, sighting.base_px.v);
    double vmax = std::max(sighting.top_px.v, sighting.base_px.v);
    double height = vmax - vmin;
    double ymin = vmin - params.margin * height;
    double ymax = vmax + params.margin * height;

    double half_width = 0.5 * spacing * params.focal_px / sighting.depth * (1.0 + params.margin);
    double center_u = (sighting.base_px.u + sighting.top_px.u) / 2.0;
    double xmin = center_u - half_width;
    double xmax = center_u + half_width;

    xmin = std::max(xmin, 0.0);
    ymin = std::max(ymin, 0.0);
    xmax = std::min(xmax, static_cast<double>(params.image_width));
    ymax = std::min(ymax, static_cast<double>(params.image_height));
    if (!(xmin < xmax) || !(ymin < ymax)) {
        fail(ErrorKind::degenerate_crop, "empty crop for tree " + sighting.tree_id + " in " +
                                             sighting.image_name);
    }

    CropRect rect;
    rect.tree_id = sighting.tree_id;
    rect.image_name = sighting.image_name;
    rect.xmin = static_cast<int>(std::floor(xmin));
    rect.ymin = static_cast<int>(std::floor(ymin));
    rect.xmax = static_cast<int>(std::ceil(xmax));
    rect.ymax = static_cast<int>(std::ceil(ymax));
    return rect;
}

CropManifest dedup_assign(std::span<const std::string> images,
                          std::span<const TreeSighting> sightings,
                          std::span<const std::string> all_tree_ids,
                          const std::function<CropRect(const TreeSighting&)>& plan) {
    // Sightings grouped per image, ordered by tree id within an image.
    std::map<std::string, std::vector<const TreeSighting*>> by_image;
    for (const TreeSighting& s : sightings) by_image[s.image_name].push_back(&s);
    for (auto& [image, list] : by_image) {
        std::sort(list.begin(), list.end(), [](const TreeSighting* a, const TreeSighting* b) {
            return a->tree_id < b->tree_id;
        });
    }

    CropManifest manifest;
    std::set<std::string> assigned;
    for (const std::string& image : images) {
        auto it = by_image.find(image);
        if (it == by_image.end()) continue;
        for (const TreeSighting* s : it->second) {
            if (!assigned.insert(s->tree_id).second) continue;
            try {
                manifest.crops.push_back(plan(*s));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::degenerate_crop) throw;
                manifest.degenerate.push_back(s->tree_id);
            }
        }
    }
    for (const std::string& id : all_tree_ids) {
        if (!assigned.count(id)) manifest.missing.push_back(id);
    }
    std::sort(manifest.missing.begin(), manifest.missing.end());
    std::sort(manifest.degenerate.begin(), manifest.degenerate.end());
    return manifest;
}

std::string write_crop_manifest_csv(const CropManifest& manifest) {
    std::string out = "tree_id,image,xmin,ymin,xmax,ymax\n";
    for (const CropRect& c : manifest.crops) {
        out += c.tree_id + "," + c.image_name + "," + std::to_string(c.xmin) + "," +
               std::to_string(c.ymin) + "," + std::to_string(c.xmax) + "," +
               std::to_string(c.ymax) + "\n";
    }
    return out;
}

std::string write_missing_list(const CropManifest& manifest) {
    std::string out;
    for (const std::string& id : manifest.missing) out += id + "\n";
    return out;
}

} // namespace orchard
