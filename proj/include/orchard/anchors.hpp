#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "orchard/boxes.hpp"

namespace orchard {

enum class ClusterMetric {
    euclidean, // distance on (w, h)
    iou,       // d = 1 - IoU of co-centred boxes
};

struct ClusterResult {
    std::vector<BoxDims> centroids; // sorted by area then width
    std::vector<int> assignments;   // nearest-centroid index per input box
    double wss = 0.0;               // sum of squared distances under the metric
};

struct KmeansOpts {
    int restarts = 10;
    int max_iters = 300;
};

// Lloyd k-means over box dimensions, best of `restarts` seeded runs by WSS.
// Euclidean centroids are coordinate means; IoU-metric centroids are member
// means with a medoid fallback when the mean would raise the cluster's WSS.
ClusterResult kmeans_boxes(std::span<const BoxDims> boxes, int k, ClusterMetric metric,
                           std::uint64_t seed, const KmeansOpts& opts = {});

// Best clustering per k in 1..k_max. Each k additionally considers a warm
// start extending the previous k's solution, which keeps the curve
// non-increasing in k.
std::vector<ClusterResult> wss_curve(std::span<const BoxDims> boxes, int k_max,
                                     ClusterMetric metric, std::uint64_t seed,
                                     const KmeansOpts& opts = {});

// (k, wss) pairs from a curve.
std::vector<std::pair<int, double>> wss_table(const std::vector<ClusterResult>& curve);

// Index (1-based k) of the largest second difference of the WSS curve; the
// conventional elbow suggestion. Returns 1 when the curve is too short.
int elbow_suggestion(const std::vector<std::pair<int, double>>& table);

struct AnchorSpec {
    double base_size = 256.0;
    std::vector<double> scales;
    std::vector<double> aspect_ratios; // h / w
    double height_stride = 16.0;
    double width_stride = 16.0;
    // false: per-cell anchors are the scales x ratios product (grid design);
    // true: scales and ratios are zipped pairwise (clustered design).
    bool paired = false;
};

// Anchor for scale s and ratio r: w = base*s/sqrt(r), h = base*s*sqrt(r).
BoxDims anchor_dims(double base_size, double scale, double aspect_ratio);

// (scale, ratio) pairs realised by a spec, in generation order.
std::vector<BoxDims> anchor_spec_dims(const AnchorSpec& spec);

// One anchor set per feature-map cell, centred at
// (col*width_stride + width_stride/2, row*height_stride + height_stride/2).
std::vector<Box> generate_anchor_grid(const AnchorSpec& spec, int fmap_w, int fmap_h);

// scale = sqrt(w*h)/base_size, ratio = h/w per centroid; strides copied from
// the baseline. The result is a paired spec.
AnchorSpec centroids_to_anchor_spec(std::span<const BoxDims> centroids, double base_size,
                                    double height_stride = 16.0, double width_stride = 16.0);

} // namespace orchard
