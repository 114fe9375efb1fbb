// Independent brute-force reference implementations used by the unit and
// acceptance suites. These deliberately avoid the library's code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "orchard/boxes.hpp"
#include "orchard/eval.hpp"
#include "orchard/util.hpp"

namespace oracle {

// IoU of integer-cornered boxes by counting unit pixels.
inline double pixel_iou(const orchard::Box& a, const orchard::Box& b) {
    auto count = [](const orchard::Box& box) {
        long long w = static_cast<long long>(box.xmax) - static_cast<long long>(box.xmin);
        long long h = static_cast<long long>(box.ymax) - static_cast<long long>(box.ymin);
        return w * h;
    };
    long long inter = 0;
    for (long long x = static_cast<long long>(std::max(a.xmin, b.xmin));
         x < static_cast<long long>(std::min(a.xmax, b.xmax)); ++x) {
        for (long long y = static_cast<long long>(std::max(a.ymin, b.ymin));
             y < static_cast<long long>(std::min(a.ymax, b.ymax)); ++y) {
            ++inter;
        }
    }
    long long uni = count(a) + count(b) - inter;
    if (uni <= 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace detail {

inline double partition_wss(std::span<const orchard::BoxDims> boxes, const std::vector<int>& assign,
                            int k) {
    double wss = 0.0;
    for (int block = 0; block < k; ++block) {
        double sw = 0.0, sh = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (assign[i] == block) {
                sw += boxes[i].w;
                sh += boxes[i].h;
                ++count;
            }
        }
        if (count == 0) continue;
        double mw = sw / count, mh = sh / count;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            if (assign[i] == block) {
                double dw = boxes[i].w - mw, dh = boxes[i].h - mh;
                wss += dw * dw + dh * dh;
            }
        }
    }
    return wss;
}

inline void rgs_recurse(std::span<const orchard::BoxDims> boxes, int k, std::vector<int>& assign,
                        std::size_t i, int max_used, double& best) {
    if (i == boxes.size()) {
        best = std::min(best, partition_wss(boxes, assign, k));
        return;
    }
    int limit = std::min(max_used + 1, k - 1);
    for (int block = 0; block <= limit; ++block) {
        assign[i] = block;
        rgs_recurse(boxes, k, assign, i + 1, std::max(max_used, block), best);
    }
}

} // namespace detail

// Optimal Euclidean k-means WSS by enumerating every partition into at most k
// blocks (restricted growth strings); centroids are block means. Exponential,
// keep the box count small.
inline double exhaustive_kmeans_wss(std::span<const orchard::BoxDims> boxes, int k) {
    std::vector<int> assign(boxes.size(), 0);
    double best = std::numeric_limits<double>::infinity();
    detail::rgs_recurse(boxes, k, assign, 1, 0, best);
    return best;
}

// All-point interpolated AP by direct enumeration: every confidence cutoff is
// a prefix of the descending-confidence list; the envelope at each recall
// level is found by a fresh forward scan.
inline double brute_force_ap(std::span<const std::uint8_t> flags,
                             std::span<const double> confidences, int n_gt) {
    if (n_gt == 0) return flags.empty() ? 1.0 : 0.0;
    if (flags.empty()) return 0.0;
    std::size_t n = flags.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return confidences[a] > confidences[b]; });

    std::vector<double> recall(n), precision(n);
    int tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (flags[order[i]]) ++tp;
        recall[i] = static_cast<double>(tp) / n_gt;
        precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }

    double ap = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (recall[i] <= prev) continue;
        double envelope = 0.0;
        for (std::size_t j = i; j < n; ++j) envelope = std::max(envelope, precision[j]);
        ap += (recall[i] - prev) * envelope;
        prev = recall[i];
    }
    return ap;
}

// Greedy NMS by repeatedly taking the highest-confidence unsuppressed
// detection (first index on ties) and marking overlaps above the threshold.
inline std::vector<orchard::Detection> reference_nms(const std::vector<orchard::Detection>& dets,
                                                     double threshold) {
    std::vector<bool> suppressed(dets.size(), false);
    std::vector<orchard::Detection> kept;
    for (;;) {
        std::size_t pick = dets.size();
        for (std::size_t i = 0; i < dets.size(); ++i) {
            if (suppressed[i]) continue;
            if (pick == dets.size() || dets[i].confidence > dets[pick].confidence) pick = i;
        }
        if (pick == dets.size()) break;
        suppressed[pick] = true;
        kept.push_back(dets[pick]);
        for (std::size_t i = 0; i < dets.size(); ++i) {
            if (!suppressed[i] && orchard::iou(dets[pick].box, dets[i].box) > threshold)
                suppressed[i] = true;
        }
    }
    return kept;
}

// Well-separated planted clusters of box dimensions. The first three centres
// are roughly equidistant so the elbow of the WSS curve sits at the planted
// cluster count rather than at any pairwise merge.
inline std::vector<orchard::BoxDims> planted_boxes(std::uint64_t seed, int clusters,
                                                   int per_cluster) {
    static const double centres[][2] = {{20, 25}, {120, 35}, {65, 130}, {170, 125}, {15, 170}};
    std::mt19937_64 rng(seed);
    std::vector<orchard::BoxDims> boxes;
    for (int c = 0; c < clusters; ++c) {
        double cw = centres[c % 5][0] + 200.0 * (c / 5);
        double ch = centres[c % 5][1];
        for (int i = 0; i < per_cluster; ++i) {
            boxes.push_back(orchard::BoxDims{cw + orchard::uniform_range(rng, -2.0, 2.0),
                                             ch + orchard::uniform_range(rng, -2.0, 2.0)});
        }
    }
    return boxes;
}

} // namespace oracle
