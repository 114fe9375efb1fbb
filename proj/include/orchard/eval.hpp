#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orchard/boxes.hpp"
#include "orchard/errors.hpp"
#include "orchard/voc.hpp"

namespace orchard {

struct Detection {
    std::string image_name;
    std::string class_label;
    Box box;
    double confidence = 0.0; // in [0, 1]
};

// Greedy non-maximum suppression for a single class: keep the highest
// confidence, drop everything overlapping it with IoU > threshold, repeat.
// Output sorted by confidence descending; ties keep input order.
std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold);

struct MatchResult {
    // Parallel arrays in descending-confidence order.
    std::vector<std::uint8_t> is_tp;
    std::vector<double> confidences;
};

// Greedy matching for one image and one class: each detection, in descending
// confidence, is a TP when its best-IoU unmatched groundtruth reaches the
// threshold (consuming that groundtruth), else a FP. No fallback to
// lower-IoU groundtruths.
MatchResult match_detections(std::span<const Detection> dets, std::span<const Box> gts,
                             double iou_threshold);

struct PRPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct PRCurve {
    std::vector<PRPoint> points; // recall non-decreasing
    double ap = 0.0;
};

// All-point interpolated average precision (area under the precision
// envelope); eleven_point switches to the pre-2010 11-point variant.
// Zero groundtruths with zero detections gives AP = 1 by convention.
PRCurve average_precision(std::span<const std::uint8_t> flags, std::span<const double> confidences,
                          int n_gt, bool eleven_point = false);

// Class-frequency weighted mAP; weights must sum to 1.
double calibrated_map(double ap_tree, double ap_ground,
                      std::pair<double, double> weights = {0.92, 0.08});

inline constexpr int kAverageRecallSteps = 10; // IoU 0.50 to 0.95 in 0.05 steps

// Mean over the IoU thresholds of matched-groundtruth fraction, keeping the
// top max_dets detections per image. nullopt when there are no groundtruths.
std::optional<double> average_recall(std::span<const Detection> dets,
                                     std::span<const GroundTruthBox> gts, int max_dets);

// Recall at a single IoU threshold under the same matching rules.
std::optional<double> recall_at_iou(std::span<const Detection> dets,
                                    std::span<const GroundTruthBox> gts, int max_dets,
                                    double iou_threshold);

struct ClassReport {
    std::string class_label;
    double ap = 0.0;
    int n_gt = 0;
    int n_det = 0;
};

struct EvalReport {
    std::vector<ClassReport> per_class; // tree_apple first, then ground_apple
    double calibrated = 0.0;
    double true_map = 0.0; // unweighted mean over the two classes
    std::optional<double> ar;
};

// Whole-test-set evaluation: detections pooled per class across images,
// matched per image at IoU >= 0.5. eleven_point switches the AP
// interpolation for comparison runs.
EvalReport evaluate_detections(std::span<const Detection> dets,
                               std::span<const GroundTruthBox> gts,
                               std::pair<double, double> weights = {0.92, 0.08},
                               int max_dets = 150, double iou_threshold = 0.5,
                               bool eleven_point = false);

// CSV with header `image,label,conf,xmin,ymin,xmax,ymax`.
std::vector<Detection> parse_detections_csv(const std::string& text);

std::string write_detections_csv(std::span<const Detection> dets, int significant_digits = 12);

} // namespace orchard
