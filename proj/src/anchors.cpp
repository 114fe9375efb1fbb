#include "orchard/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "orchard/errors.hpp"
#include "orchard/util.hpp"

namespace orchard {

namespace {

double metric_distance(const BoxDims& a, const BoxDims& b, ClusterMetric metric) {
    if (metric == ClusterMetric::euclidean) return std::hypot(a.w - b.w, a.h - b.h);
    return 1.0 - dims_iou(a, b);
}

double squared_distance(const BoxDims& a, const BoxDims& b, ClusterMetric metric) {
    double d = metric_distance(a, b, metric);
    return d * d;
}

int nearest_centroid(const BoxDims& box, std::span<const BoxDims> centroids, ClusterMetric metric) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = squared_distance(box, centroids[c], metric);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

double total_wss(std::span<const BoxDims> boxes, std::span<const int> assignments,
                 std::span<const BoxDims> centroids, ClusterMetric metric) {
    double wss = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i)
        wss += squared_distance(boxes[i], centroids[static_cast<std::size_t>(assignments[i])], metric);
    return wss;
}

BoxDims member_mean(std::span<const BoxDims> boxes, std::span<const int> assignments, int cluster) {
    double sw = 0.0, sh = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (assignments[i] == cluster) {
            sw += boxes[i].w;
            sh += boxes[i].h;
            ++n;
        }
    }
    return BoxDims{sw / n, sh / n};
}

double cluster_wss(std::span<const BoxDims> boxes, std::span<const int> assignments, int cluster,
                   const BoxDims& centroid, ClusterMetric metric) {
    double wss = 0.0;
    for (std::size_t i = 0; i < boxes.size(); ++i)
        if (assignments[i] == cluster) wss += squared_distance(boxes[i], centroid, metric);
    return wss;
}

BoxDims cluster_medoid(std::span<const BoxDims> boxes, std::span<const int> assignments, int cluster,
                       ClusterMetric metric) {
    double best = std::numeric_limits<double>::infinity();
    BoxDims medoid{};
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (assignments[i] != cluster) continue;
        double wss = cluster_wss(boxes, assignments, cluster, boxes[i], metric);
        if (wss < best) {
            best = wss;
            medoid = boxes[i];
        }
    }
    return medoid;
}

std::vector<BoxDims> kmeanspp_init(std::span<const BoxDims> boxes, int k, ClusterMetric metric,
                                   std::mt19937_64& rng) {
    std::vector<BoxDims> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    centroids.push_back(boxes[uniform_below(rng, boxes.size())]);
    std::vector<double> d2(boxes.size());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (const BoxDims& c : centroids) d = std::min(d, squared_distance(boxes[i], c, metric));
            d2[i] = d;
            total += d;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = uniform_below(rng, boxes.size());
        } else {
            double r = uniform_unit(rng) * total;
            double acc = 0.0;
            pick = boxes.size() - 1;
            for (std::size_t i = 0; i < boxes.size(); ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(boxes[pick]);
    }
    return centroids;
}

// Lloyd iterations from given centroids to convergence or the iteration cap.
ClusterResult lloyd(std::span<const BoxDims> boxes, std::vector<BoxDims> centroids,
                    ClusterMetric metric, int max_iters) {
    int k = static_cast<int>(centroids.size());
    std::vector<int> assignments(boxes.size(), -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            int a = nearest_centroid(boxes[i], centroids, metric);
            if (a != assignments[i]) {
                assignments[i] = a;
                changed = true;
            }
        }

        // Repair empty clusters with the globally worst-fitting box.
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int a : assignments) ++counts[static_cast<std::size_t>(a)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            std::size_t worst = 0;
            double worst_d = -1.0;
            for (std::size_t i = 0; i < boxes.size(); ++i) {
                if (counts[static_cast<std::size_t>(assignments[i])] <= 1) continue;
                double d = squared_distance(
                    boxes[i], centroids[static_cast<std::size_t>(assignments[i])], metric);
                if (d > worst_d) {
                    worst_d = d;
                    worst = i;
                }
            }
            --counts[static_cast<std::size_t>(assignments[worst])];
            assignments[worst] = c;
            counts[static_cast<std::size_t>(c)] = 1;
            centroids[static_cast<std::size_t>(c)] = boxes[worst];
            changed = true;
        }

        if (!changed) break;

        for (int c = 0; c < k; ++c) {
            BoxDims mean = member_mean(boxes, assignments, c);
            if (metric == ClusterMetric::euclidean) {
                centroids[static_cast<std::size_t>(c)] = mean;
                continue;
            }
            // IoU metric: keep the mean unless it raises the cluster WSS.
            double current = cluster_wss(boxes, assignments, c,
                                         centroids[static_cast<std::size_t>(c)], metric);
            double with_mean = cluster_wss(boxes, assignments, c, mean, metric);
            if (with_mean <= current) {
                centroids[static_cast<std::size_t>(c)] = mean;
            } else {
                BoxDims medoid = cluster_medoid(boxes, assignments, c, metric);
                if (cluster_wss(boxes, assignments, c, medoid, metric) < current)
                    centroids[static_cast<std::size_t>(c)] = medoid;
            }
        }
    }

    // If the iteration cap fired mid-cycle, realign assignments with the
    // final centroids.
    for (std::size_t i = 0; i < boxes.size(); ++i)
        assignments[i] = nearest_centroid(boxes[i], centroids, metric);

    ClusterResult result;
    result.centroids = std::move(centroids);
    result.assignments = std::move(assignments);
    result.wss = total_wss(boxes, result.assignments, result.centroids, metric);
    return result;
}

void canonicalize(ClusterResult& result) {
    int k = static_cast<int>(result.centroids.size());
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const BoxDims& ca = result.centroids[static_cast<std::size_t>(a)];
        const BoxDims& cb = result.centroids[static_cast<std::size_t>(b)];
        double area_a = ca.w * ca.h, area_b = cb.w * cb.h;
        if (area_a != area_b) return area_a < area_b;
        if (ca.w != cb.w) return ca.w < cb.w;
        return ca.h < cb.h;
    });
    std::vector<int> rank(static_cast<std::size_t>(k));
    std::vector<BoxDims> sorted(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        rank[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
        sorted[static_cast<std::size_t>(i)] = result.centroids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    }
    result.centroids = std::move(sorted);
    for (int& a : result.assignments) a = rank[static_cast<std::size_t>(a)];
}

ClusterResult best_of(std::span<const BoxDims> boxes, int k, ClusterMetric metric,
                      std::uint64_t seed, const KmeansOpts& opts,
                      const ClusterResult* warm_start) {
    ClusterResult best;
    best.wss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        ClusterResult run = lloyd(boxes, kmeanspp_init(boxes, k, metric, rng), metric, opts.max_iters);
        if (run.wss < best.wss) best = std::move(run);
    }
    if (warm_start && static_cast<int>(warm_start->centroids.size()) == k - 1) {
        // Previous solution plus its worst-fitting box as the k-th centroid.
        std::vector<BoxDims> centroids = warm_start->centroids;
        std::size_t worst = 0;
        double worst_d = -1.0;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            double d = squared_distance(
                boxes[i], centroids[static_cast<std::size_t>(warm_start->assignments[i])], metric);
            if (d > worst_d) {
                worst_d = d;
                worst = i;
            }
        }
        centroids.push_back(boxes[worst]);
        ClusterResult run = lloyd(boxes, std::move(centroids), metric, opts.max_iters);
        if (run.wss < best.wss) best = std::move(run);
    }
    canonicalize(best);
    return best;
}

} // namespace

ClusterResult kmeans_boxes(std::span<const BoxDims> boxes, int k, ClusterMetric metric,
                           std::uint64_t seed, const KmeansOpts& opts) {
    if (k < 1 || boxes.size() < static_cast<std::size_t>(k)) {
        fail(ErrorKind::insufficient_boxes, "k = " + std::to_string(k) + " needs at least k boxes, have " +
                                                std::to_string(boxes.size()));
    }
    return best_of(boxes, k, metric, seed, opts, nullptr);
}

std::vector<ClusterResult> wss_curve(std::span<const BoxDims> boxes, int k_max,
                                     ClusterMetric metric, std::uint64_t seed,
                                     const KmeansOpts& opts) {
    if (k_max < 1 || boxes.size() < static_cast<std::size_t>(k_max)) {
        fail(ErrorKind::insufficient_boxes, "k_max = " + std::to_string(k_max) +
                                                " exceeds box count " + std::to_string(boxes.size()));
    }
    std::vector<ClusterResult> curve;
    curve.reserve(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        const ClusterResult* warm = curve.empty() ? nullptr : &curve.back();
        curve.push_back(best_of(boxes, k, metric, seed, opts, warm));
    }
    return curve;
}

std::vector<std::pair<int, double>> wss_table(const std::vector<ClusterResult>& curve) {
    std::vector<std::pair<int, double>> table;
    table.reserve(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i)
        table.emplace_back(static_cast<int>(i) + 1, curve[i].wss);
    return table;
}

int elbow_suggestion(const std::vector<std::pair<int, double>>& table) {
    if (table.size() < 3) return 1;
    int best_k = table[1].first;
    double best_dd = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < table.size(); ++i) {
        double dd = table[i - 1].second - 2.0 * table[i].second + table[i + 1].second;
        if (dd > best_dd) {
            best_dd = dd;
            best_k = table[i].first;
        }
    }
    return best_k;
}

BoxDims anchor_dims(double base_size, double scale, double aspect_ratio) {
    double root = std::sqrt(aspect_ratio);
    return BoxDims{base_size * scale / root, base_size * scale * root};
}

std::vector<BoxDims> anchor_spec_dims(const AnchorSpec& spec) {
    std::vector<BoxDims> dims;
    if (spec.paired) {
        if (spec.scales.size() != spec.aspect_ratios.size()) {
            fail(ErrorKind::domain_error, "paired anchor spec requires equal scale/ratio counts");
        }
        for (std::size_t i = 0; i < spec.scales.size(); ++i)
            dims.push_back(anchor_dims(spec.base_size, spec.scales[i], spec.aspect_ratios[i]));
    } else {
        for (double s : spec.scales)
            for (double r : spec.aspect_ratios) dims.push_back(anchor_dims(spec.base_size, s, r));
    }
    return dims;
}

std::vector<Box> generate_anchor_grid(const AnchorSpec& spec, int fmap_w, int fmap_h) {
    std::vector<BoxDims> dims = anchor_spec_dims(spec);
    std::vector<Box> anchors;
    anchors.reserve(static_cast<std::size_t>(fmap_w) * static_cast<std::size_t>(fmap_h) * dims.size());
    for (int row = 0; row < fmap_h; ++row) {
        double cy = row * spec.height_stride + spec.height_stride / 2.0;
        for (int col = 0; col < fmap_w; ++col) {
            double cx = col * spec.width_stride + spec.width_stride / 2.0;
            for (const BoxDims& d : dims) anchors.push_back(Box::from_center(cx, cy, d.w, d.h));
        }
    }
    return anchors;
}

AnchorSpec centroids_to_anchor_spec(std::span<const BoxDims> centroids, double base_size,
                                    double height_stride, double width_stride) {
    AnchorSpec spec;
    spec.base_size = base_size;
    spec.height_stride = height_stride;
    spec.width_stride = width_stride;
    spec.paired = true;
    for (const BoxDims& c : centroids) {
        spec.scales.push_back(std::sqrt(c.w * c.h) / base_size);
        spec.aspect_ratios.push_back(c.h / c.w);
    }
    return spec;
}

} // namespace orchard
