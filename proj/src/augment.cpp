#include "orchard/augment.hpp"

#include <algorithm>
#include <cmath>

#include "orchard/errors.hpp"

namespace orchard {

Box mirror_box(const Box& box, double image_width) {
    return Box{image_width - box.xmax, box.ymin, image_width - box.xmin, box.ymax};
}

Box rotate_box_hull(const Box& box, double angle_deg, double image_width, double image_height) {
    double cx = image_width / 2.0;
    double cy = image_height / 2.0;
    double a = angle_deg * M_PI / 180.0;
    double c = std::cos(a), s = std::sin(a);

    double xs[4] = {box.xmin, box.xmax, box.xmax, box.xmin};
    double ys[4] = {box.ymin, box.ymin, box.ymax, box.ymax};
    Box hull{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int i = 0; i < 4; ++i) {
        double dx = xs[i] - cx, dy = ys[i] - cy;
        double rx = cx + dx * c - dy * s;
        double ry = cy + dx * s + dy * c;
        hull.xmin = std::min(hull.xmin, rx);
        hull.ymin = std::min(hull.ymin, ry);
        hull.xmax = std::max(hull.xmax, rx);
        hull.ymax = std::max(hull.ymax, ry);
    }
    return hull;
}

Box rotate_box(const Box& box, double angle_deg, double image_width, double image_height) {
    Box hull = rotate_box_hull(box, angle_deg, image_width, image_height);
    Box clipped{std::max(hull.xmin, 0.0), std::max(hull.ymin, 0.0),
                std::min(hull.xmax, image_width), std::min(hull.ymax, image_height)};
    if (!(clipped.xmin < clipped.xmax) || !(clipped.ymin < clipped.ymax)) {
        fail(ErrorKind::degenerate_box, "box rotated fully outside the image");
    }
    return clipped;
}

void AugmentSpec::validate() const {
    if (op == Op::rotate && !(std::abs(angle_deg) <= 60.0)) {
        fail(ErrorKind::domain_error, "rotation angle must lie in [-60, 60] degrees");
    }
}

std::optional<Box> apply_augment(const AugmentSpec& spec, const Box& box, double image_width,
                                 double image_height, double min_visible) {
    if (spec.op == AugmentSpec::Op::none) return box;
    if (spec.op == AugmentSpec::Op::mirror_h) return mirror_box(box, image_width);

    Box hull = rotate_box_hull(box, spec.angle_deg, image_width, image_height);
    Box clipped{std::max(hull.xmin, 0.0), std::max(hull.ymin, 0.0),
                std::min(hull.xmax, image_width), std::min(hull.ymax, image_height)};
    if (!(clipped.xmin < clipped.xmax) || !(clipped.ymin < clipped.ymax)) return std::nullopt;
    if (hull.area() > 0.0 && clipped.area() / hull.area() < min_visible) return std::nullopt;
    return clipped;
}

std::string augment_op_name(AugmentSpec::Op op) {
    switch (op) {
        case AugmentSpec::Op::mirror_h: return "mirror_h";
        case AugmentSpec::Op::rotate: return "rotate";
        case AugmentSpec::Op::none: return "none";
    }
    return "none";
}

} // namespace orchard
