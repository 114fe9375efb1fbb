#pragma once

#include <optional>
#include <string>

#include "orchard/boxes.hpp"

namespace orchard {

// Reflects the box about the vertical image midline.
Box mirror_box(const Box& box, double image_width);

// Rotates the box corners about the image centre by angle_deg (positive turns
// clockwise on screen, image y pointing down), returns the axis-aligned hull
// clipped to image bounds. Throws degenerate_box when the clipped hull is
// empty.
Box rotate_box(const Box& box, double angle_deg, double image_width, double image_height);

// Unclipped rotated hull, exposed for visibility-fraction decisions.
Box rotate_box_hull(const Box& box, double angle_deg, double image_width, double image_height);

struct AugmentSpec {
    // `none` passes boxes through untouched: the hook for pixel-level
    // transforms (blur, noise) done by an external image tool.
    enum class Op { mirror_h, rotate, none };
    Op op = Op::mirror_h;
    double angle_deg = 0.0; // rotate only, limited to [-60, 60]

    // Throws domain_error when the angle bound is violated.
    void validate() const;
};

// Applies the spec to one box; nullopt when the box is dropped (clipped away
// entirely, or visible fraction of the rotated hull below min_visible).
std::optional<Box> apply_augment(const AugmentSpec& spec, const Box& box, double image_width,
                                 double image_height, double min_visible = 0.25);

std::string augment_op_name(AugmentSpec::Op op);

} // namespace orchard
