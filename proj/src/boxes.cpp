#include "orchard/boxes.hpp"

#include <algorithm>

namespace orchard {

double iou(const Box& a, const Box& b) {
    double ix = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
    double iy = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    double inter = ix * iy;
    double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

double dims_iou(const BoxDims& a, const BoxDims& b) {
    double inter = std::min(a.w, b.w) * std::min(a.h, b.h);
    double uni = a.w * a.h + b.w * b.h - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

} // namespace orchard
