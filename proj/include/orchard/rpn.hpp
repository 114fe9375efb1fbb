#pragma once

#include <span>
#include <vector>

#include "orchard/boxes.hpp"

namespace orchard {

enum class AnchorLabelKind { positive, negative, ignore };

struct AnchorLabel {
    AnchorLabelKind kind = AnchorLabelKind::negative;
    int matched_gt = -1; // valid for positives only
};

// Positive when max IoU over groundtruths > pos_threshold (matched to the
// argmax), negative when max IoU < neg_threshold, ignore otherwise. Empty
// groundtruth lists make every anchor negative.
std::vector<AnchorLabel> label_anchors(std::span<const Box> anchors, std::span<const Box> gts,
                                       double pos_threshold = 0.7, double neg_threshold = 0.3);

struct BoxDelta {
    double tx = 0.0, ty = 0.0, tw = 0.0, th = 0.0;
};

// tx = (gx-ax)/aw, ty = (gy-ay)/ah, tw = ln(gw/aw), th = ln(gh/ah).
BoxDelta encode_deltas(const Box& anchor, const Box& gt);
// Exact inverse of encode_deltas.
Box decode_deltas(const Box& anchor, const BoxDelta& delta);

// 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise.
double smooth_l1(double x);
// Elementwise smooth L1 summed over the four components.
double smooth_l1(const BoxDelta& d);

struct LossBreakdown {
    double cls_loss = 0.0; // unnormalised sum of binary log losses
    double reg_loss = 0.0; // unnormalised sum of smooth L1 terms over positives
    double total = 0.0;    // cls_loss/n_cls + lambda * reg_loss/n_reg
    double n_cls = 1.0;
    double n_reg = 1.0;
    double lambda = 10.0;
};

// Multi-task RPN loss. Ignore-labelled anchors are excluded from both sums;
// the log arguments are floored at 1e-7 so exact predictions give exactly
// zero while 0/1 probabilities stay finite. Probabilities outside [0, 1]
// raise domain_error.
LossBreakdown rpn_loss(std::span<const double> probs, std::span<const AnchorLabel> labels,
                       std::span<const BoxDelta> deltas, std::span<const BoxDelta> targets,
                       double lambda, double n_cls, double n_reg);

// update = -eta*grad + gamma*velocity; theta += update; velocity = update.
void momentum_step(std::span<double> theta, std::span<const double> grad,
                   std::span<double> velocity, double eta, double gamma);

} // namespace orchard
