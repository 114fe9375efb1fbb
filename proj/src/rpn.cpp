#include "orchard/rpn.hpp"

#include <cmath>

#include "orchard/errors.hpp"

namespace orchard {

namespace {
constexpr double kLogFloor = 1e-7;
}

std::vector<AnchorLabel> label_anchors(std::span<const Box> anchors, std::span<const Box> gts,
                                       double pos_threshold, double neg_threshold) {
    std::vector<AnchorLabel> labels(anchors.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        double best_iou = 0.0;
        int best_gt = -1;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            double v = iou(anchors[i], gts[g]);
            if (v > best_iou) {
                best_iou = v;
                best_gt = static_cast<int>(g);
            }
        }
        AnchorLabel& label = labels[i];
        if (best_iou > pos_threshold) {
            label.kind = AnchorLabelKind::positive;
            label.matched_gt = best_gt;
        } else if (best_iou < neg_threshold) {
            label.kind = AnchorLabelKind::negative;
        } else {
            label.kind = AnchorLabelKind::ignore;
        }
    }
    return labels;
}

BoxDelta encode_deltas(const Box& anchor, const Box& gt) {
    double aw = anchor.width(), ah = anchor.height();
    return BoxDelta{
        (gt.cx() - anchor.cx()) / aw,
        (gt.cy() - anchor.cy()) / ah,
        std::log(gt.width() / aw),
        std::log(gt.height() / ah),
    };
}

Box decode_deltas(const Box& anchor, const BoxDelta& delta) {
    double aw = anchor.width(), ah = anchor.height();
    double cx = anchor.cx() + delta.tx * aw;
    double cy = anchor.cy() + delta.ty * ah;
    double w = aw * std::exp(delta.tw);
    double h = ah * std::exp(delta.th);
    return Box::from_center(cx, cy, w, h);
}

double smooth_l1(double x) {
    double a = std::abs(x);
    if (a < 1.0) return 0.5 * x * x;
    return a - 0.5;
}

double smooth_l1(const BoxDelta& d) {
    return smooth_l1(d.tx) + smooth_l1(d.ty) + smooth_l1(d.tw) + smooth_l1(d.th);
}

LossBreakdown rpn_loss(std::span<const double> probs, std::span<const AnchorLabel> labels,
                       std::span<const BoxDelta> deltas, std::span<const BoxDelta> targets,
                       double lambda, double n_cls, double n_reg) {
    if (probs.size() != labels.size() || deltas.size() != labels.size() ||
        targets.size() != labels.size()) {
        fail(ErrorKind::domain_error, "rpn_loss inputs must be conformable");
    }

    LossBreakdown out;
    out.lambda = lambda;
    out.n_cls = n_cls;
    out.n_reg = n_reg;

    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].kind == AnchorLabelKind::ignore) continue;
        double p = probs[i];
        if (!(p >= 0.0 && p <= 1.0)) {
            fail(ErrorKind::domain_error, "probability outside [0, 1] at anchor " + std::to_string(i));
        }
        bool positive = labels[i].kind == AnchorLabelKind::positive;
        if (positive) {
            out.cls_loss += -std::log(std::max(p, kLogFloor));
            BoxDelta err{deltas[i].tx - targets[i].tx, deltas[i].ty - targets[i].ty,
                         deltas[i].tw - targets[i].tw, deltas[i].th - targets[i].th};
            out.reg_loss += smooth_l1(err);
        } else {
            out.cls_loss += -std::log(std::max(1.0 - p, kLogFloor));
        }
    }
    out.total = out.cls_loss / n_cls + lambda * out.reg_loss / n_reg;
    return out;
}

void momentum_step(std::span<double> theta, std::span<const double> grad,
                   std::span<double> velocity, double eta, double gamma) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double update = -eta * grad[i] + gamma * velocity[i];
        theta[i] += update;
        velocity[i] = update;
    }
}

} // namespace orchard
