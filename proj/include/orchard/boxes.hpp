#pragma once

namespace orchard {

// Axis-aligned box in corner form. Widths are continuous: w = xmax - xmin.
struct Box {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    static Box from_center(double cx, double cy, double w, double h) {
        return Box{cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0};
    }

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    double cx() const { return (xmin + xmax) / 2.0; }
    double cy() const { return (ymin + ymax) / 2.0; }
};

// Intersection over union; 0 for disjoint boxes.
double iou(const Box& a, const Box& b);

// Width/height of a groundtruth box, detached from position.
struct BoxDims {
    double w = 0.0, h = 0.0;
};

// IoU of two boxes sharing a common centre.
double dims_iou(const BoxDims& a, const BoxDims& b);

} // namespace orchard
