#include "orchard/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "orchard/errors.hpp"
#include "orchard/util.hpp"

namespace orchard {

namespace {

std::vector<std::size_t> confidence_order(std::span<const Detection> dets) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].confidence > dets[b].confidence;
    });
    return order;
}

} // namespace

std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
    std::vector<std::size_t> order = confidence_order(dets);
    std::vector<Detection> kept;
    kept.reserve(dets.size());
    for (std::size_t idx : order) {
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (iou(dets[idx].box, k.box) > iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(std::move(dets[idx]));
    }
    return kept;
}

MatchResult match_detections(std::span<const Detection> dets, std::span<const Box> gts,
                             double iou_threshold) {
    std::vector<std::size_t> order = confidence_order(dets);
    std::vector<bool> consumed(gts.size(), false);

    MatchResult result;
    result.is_tp.reserve(dets.size());
    result.confidences.reserve(dets.size());
    for (std::size_t idx : order) {
        double best_iou = -1.0;
        std::size_t best_gt = gts.size();
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (consumed[g]) continue;
            double v = iou(dets[idx].box, gts[g]);
            if (v > best_iou) {
                best_iou = v;
                best_gt = g;
            }
        }
        bool tp = best_gt < gts.size() && best_iou >= iou_threshold;
        if (tp) consumed[best_gt] = true;
        result.is_tp.push_back(tp ? 1 : 0);
        result.confidences.push_back(dets[idx].confidence);
    }
    return result;
}

PRCurve average_precision(std::span<const std::uint8_t> flags, std::span<const double> confidences,
                          int n_gt, bool eleven_point) {
    if (flags.size() != confidences.size()) {
        fail(ErrorKind::domain_error, "flags and confidences must be conformable");
    }

    PRCurve curve;
    if (n_gt == 0) {
        // No groundtruth: vacuously perfect when nothing was detected.
        curve.ap = flags.empty() ? 1.0 : 0.0;
        return curve;
    }
    if (flags.empty()) {
        curve.ap = 0.0;
        return curve;
    }

    std::vector<std::size_t> order(flags.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return confidences[a] > confidences[b]; });

    int tp = 0, fp = 0;
    curve.points.reserve(flags.size());
    for (std::size_t idx : order) {
        if (flags[idx]) ++tp;
        else ++fp;
        curve.points.push_back(PRPoint{static_cast<double>(tp) / n_gt,
                                       static_cast<double>(tp) / (tp + fp)});
    }

    std::size_t n = curve.points.size();
    std::vector<double> envelope(n);
    double running = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        running = std::max(running, curve.points[i].precision);
        envelope[i] = running;
    }

    double ap = 0.0;
    if (eleven_point) {
        for (int level = 0; level <= 10; ++level) {
            double r = level / 10.0;
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (curve.points[i].recall >= r) {
                    best = envelope[i];
                    break;
                }
            }
            ap += best / 11.0;
        }
    } else {
        double prev_recall = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = curve.points[i].recall;
            if (r > prev_recall) {
                ap += (r - prev_recall) * envelope[i];
                prev_recall = r;
            }
        }
    }
    curve.ap = ap;
    return curve;
}

double calibrated_map(double ap_tree, double ap_ground, std::pair<double, double> weights) {
    if (std::abs(weights.first + weights.second - 1.0) > 1e-9) {
        fail(ErrorKind::weight_sum, "calibration weights must sum to 1");
    }
    return weights.first * ap_tree + weights.second * ap_ground;
}

namespace {

struct GroupKey {
    std::string image;
    std::string label;
    bool operator<(const GroupKey& o) const {
        if (image != o.image) return image < o.image;
        return label < o.label;
    }
};

// Caps detections per image, then groups detections and groundtruths by
// (image, class) for matching.
struct GroupedInput {
    std::map<GroupKey, std::vector<Detection>> dets;
    std::map<GroupKey, std::vector<Box>> gts;
    std::size_t total_gts = 0;
};

GroupedInput group_for_matching(std::span<const Detection> dets,
                                std::span<const GroundTruthBox> gts, int max_dets) {
    GroupedInput grouped;
    std::map<std::string, std::vector<Detection>> per_image;
    for (const Detection& d : dets) per_image[d.image_name].push_back(d);
    for (auto& [image, list] : per_image) {
        std::vector<std::size_t> order = confidence_order(list);
        std::size_t cap = std::min<std::size_t>(list.size(), static_cast<std::size_t>(max_dets));
        for (std::size_t i = 0; i < cap; ++i) {
            const Detection& d = list[order[i]];
            grouped.dets[GroupKey{image, d.class_label}].push_back(d);
        }
    }
    for (const GroundTruthBox& g : gts) {
        grouped.gts[GroupKey{g.image_name, g.class_label}].push_back(g.box());
        ++grouped.total_gts;
    }
    return grouped;
}

std::size_t matched_at_threshold(const GroupedInput& grouped, double threshold) {
    std::size_t matched = 0;
    for (const auto& [key, group_dets] : grouped.dets) {
        auto it = grouped.gts.find(key);
        if (it == grouped.gts.end()) continue;
        MatchResult res = match_detections(group_dets, it->second, threshold);
        matched += static_cast<std::size_t>(std::count(res.is_tp.begin(), res.is_tp.end(), 1));
    }
    return matched;
}

} // namespace

std::optional<double> recall_at_iou(std::span<const Detection> dets,
                                    std::span<const GroundTruthBox> gts, int max_dets,
                                    double iou_threshold) {
    GroupedInput grouped = group_for_matching(dets, gts, max_dets);
    if (grouped.total_gts == 0) return std::nullopt;
    return static_cast<double>(matched_at_threshold(grouped, iou_threshold)) /
           static_cast<double>(grouped.total_gts);
}

std::optional<double> average_recall(std::span<const Detection> dets,
                                     std::span<const GroundTruthBox> gts, int max_dets) {
    GroupedInput grouped = group_for_matching(dets, gts, max_dets);
    if (grouped.total_gts == 0) return std::nullopt;
    double sum = 0.0;
    for (int step = 0; step < kAverageRecallSteps; ++step) {
        double threshold = 0.50 + 0.05 * step;
        sum += static_cast<double>(matched_at_threshold(grouped, threshold)) /
               static_cast<double>(grouped.total_gts);
    }
    return sum / kAverageRecallSteps;
}

std::vector<Detection> parse_detections_csv(const std::string& text) {
    std::istringstream ss(text);
    std::string line;
    int line_no = 0;
    std::vector<Detection> dets;
    bool saw_header = false;
    const std::string expected_header = "image,label,conf,xmin,ymin,xmax,ymax";
    while (std::getline(ss, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (!saw_header) {
            if (t != expected_header) {
                fail(ErrorKind::malformed_line,
                     "line " + std::to_string(line_no) + ": expected header '" + expected_header + "'");
            }
            saw_header = true;
            continue;
        }
        std::vector<std::string> toks = split_char(t, ',');
        if (toks.size() != 7) {
            fail(ErrorKind::malformed_line, "line " + std::to_string(line_no) + ": expected 7 fields");
        }
        Detection d;
        d.image_name = trim(toks[0]);
        d.class_label = trim(toks[1]);
        if (!is_known_class(d.class_label)) {
            fail(ErrorKind::unknown_class,
                 "line " + std::to_string(line_no) + ": unknown class '" + d.class_label + "'");
        }
        double v[5];
        for (int i = 0; i < 5; ++i) {
            auto p = parse_double(trim(toks[static_cast<std::size_t>(i) + 2]));
            if (!p) {
                fail(ErrorKind::malformed_line, "line " + std::to_string(line_no) +
                                                    ": unparseable float '" +
                                                    toks[static_cast<std::size_t>(i) + 2] + "'");
            }
            v[i] = *p;
        }
        d.confidence = v[0];
        d.box = Box{v[1], v[2], v[3], v[4]};
        if (d.confidence < 0.0 || d.confidence > 1.0 || !(d.box.xmin < d.box.xmax) ||
            !(d.box.ymin < d.box.ymax)) {
            fail(ErrorKind::malformed_line,
                 "line " + std::to_string(line_no) + ": invalid confidence or box");
        }
        dets.push_back(std::move(d));
    }
    if (!saw_header) fail(ErrorKind::malformed_line, "detections CSV is empty");
    return dets;
}

std::string write_detections_csv(std::span<const Detection> dets, int significant_digits) {
    std::string out = "image,label,conf,xmin,ymin,xmax,ymax\n";
    for (const Detection& d : dets) {
        out += d.image_name + "," + d.class_label + "," + format_g(d.confidence, significant_digits);
        for (double v : {d.box.xmin, d.box.ymin, d.box.xmax, d.box.ymax}) {
            out += ',';
            out += format_g(v, significant_digits);
        }
        out += '\n';
    }
    return out;
}

EvalReport evaluate_detections(std::span<const Detection> dets,
                               std::span<const GroundTruthBox> gts,
                               std::pair<double, double> weights, int max_dets,
                               double iou_threshold, bool eleven_point) {
    EvalReport report;
    for (const char* label_cstr : {kClassTreeApple, kClassGroundApple}) {
        const std::string label(label_cstr);
        // Pool matched flags per class across the whole set.
        std::map<std::string, std::vector<Detection>> dets_by_image;
        std::map<std::string, std::vector<Box>> gts_by_image;
        int n_gt = 0, n_det = 0;
        for (const Detection& d : dets) {
            if (d.class_label != label) continue;
            dets_by_image[d.image_name].push_back(d);
            ++n_det;
        }
        for (const GroundTruthBox& g : gts) {
            if (g.class_label != label) continue;
            gts_by_image[g.image_name].push_back(g.box());
            ++n_gt;
        }
        std::vector<std::uint8_t> flags;
        std::vector<double> confidences;
        for (const auto& [image, image_dets] : dets_by_image) {
            auto it = gts_by_image.find(image);
            std::span<const Box> image_gts =
                it == gts_by_image.end() ? std::span<const Box>{} : std::span<const Box>(it->second);
            MatchResult res = match_detections(image_dets, image_gts, iou_threshold);
            flags.insert(flags.end(), res.is_tp.begin(), res.is_tp.end());
            confidences.insert(confidences.end(), res.confidences.begin(), res.confidences.end());
        }
        PRCurve curve = average_precision(flags, confidences, n_gt, eleven_point);
        report.per_class.push_back(ClassReport{label, curve.ap, n_gt, n_det});
    }
    report.calibrated = calibrated_map(report.per_class[0].ap, report.per_class[1].ap, weights);
    report.true_map = (report.per_class[0].ap + report.per_class[1].ap) / 2.0;
    report.ar = average_recall(dets, gts, max_dets);
    return report;
}

} // namespace orchard
