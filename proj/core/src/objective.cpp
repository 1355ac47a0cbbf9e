#include "dunet/objective.hpp"

#include <algorithm>
#include <cmath>

#include "dunet/common.hpp"

namespace dunet {

namespace {

struct SoftCounts {
    double tp = 0.0, tn = 0.0, fp = 0.0, fn = 0.0;
    std::size_t n = 0;
};

double clip(double p, double c) { return std::min(std::max(p, c), 1.0 - c); }

SoftCounts soft_counts(std::span<const double> y, std::span<const double> yhat,
                       std::span<const std::uint8_t> mask, double c) {
    SoftCounts s;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!mask[i]) continue;
        const double p = clip(yhat[i], c);
        s.tp += y[i] * p;
        s.tn += (1.0 - y[i]) * (1.0 - p);
        s.fp += (1.0 - y[i]) * p;
        s.fn += y[i] * (1.0 - p);
        ++s.n;
    }
    return s;
}

void check_inputs(std::span<const double> y, std::span<const double> yhat,
                  std::span<const std::uint8_t> mask) {
    if (y.size() != yhat.size() || y.size() != mask.size())
        raise(ErrorCategory::validation, "objective: y/yhat/mask size mismatch");
    bool any = false;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) { any = true; break; }
    if (!any)
        raise(ErrorCategory::validation,
              "objective: empty mask, reduction undefined");
}

double mcc_from_counts(const SoftCounts& s, double e) {
    const double num = s.tp * s.tn - s.fp * s.fn;
    const double s1 = s.tp + s.fp, s2 = s.tp + s.fn, s3 = s.tn + s.fp, s4 = s.tn + s.fn;
    return num / std::sqrt(s1 * s2 * s3 * s4 + e);
}

}  // namespace

double bce(std::span<const double> y, std::span<const double> yhat,
           std::span<const std::uint8_t> mask, const ObjectiveOptions& opt) {
    check_inputs(y, yhat, mask);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!mask[i]) continue;
        const double p = clip(yhat[i], opt.prob_clip);
        sum -= y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
        ++n;
    }
    return sum / static_cast<double>(n);
}

void bce_grad(std::span<const double> y, std::span<const double> yhat,
              std::span<const std::uint8_t> mask, std::span<double> grad,
              const ObjectiveOptions& opt) {
    check_inputs(y, yhat, mask);
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) ++n;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!mask[i]) continue;
        // clip is flat outside the band, so its gradient is zero there
        if (yhat[i] < opt.prob_clip || yhat[i] > 1.0 - opt.prob_clip) continue;
        const double p = yhat[i];
        grad[i] += (p - y[i]) / (p * (1.0 - p)) * inv_n;
    }
}

double soft_mcc(std::span<const double> y, std::span<const double> yhat,
                std::span<const std::uint8_t> mask, const ObjectiveOptions& opt) {
    check_inputs(y, yhat, mask);
    return mcc_from_counts(soft_counts(y, yhat, mask, opt.prob_clip), opt.mcc_epsilon);
}

void soft_mcc_grad(std::span<const double> y, std::span<const double> yhat,
                   std::span<const std::uint8_t> mask, std::span<double> grad,
                   const ObjectiveOptions& opt) {
    check_inputs(y, yhat, mask);
    const SoftCounts s = soft_counts(y, yhat, mask, opt.prob_clip);
    const double s1 = s.tp + s.fp, s2 = s.tp + s.fn, s3 = s.tn + s.fp, s4 = s.tn + s.fn;
    const double num = s.tp * s.tn - s.fp * s.fn;
    const double p = s1 * s2 * s3 * s4 + opt.mcc_epsilon;
    const double d = std::sqrt(p);
    const double d3 = d * p;  // d^3
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!mask[i]) continue;
        if (yhat[i] < opt.prob_clip || yhat[i] > 1.0 - opt.prob_clip) continue;
        const double yi = y[i];
        // dN/dp_i: TP'=y, TN'=-(1-y), FP'=(1-y), FN'=-y
        const double dnum = yi * s.tn - (1.0 - yi) * s.tp - ((1.0 - yi) * s.fn - yi * s.fp);
        // only S1=sum(p) and S4=sum(1-p) depend on p_i
        const double dp = s2 * s3 * (s4 - s1);
        grad[i] += dnum / d - num * dp / (2.0 * d3);
    }
}

LossValue composite_loss(std::span<const double> y, std::span<const double> yhat,
                         std::span<const std::uint8_t> mask, const ObjectiveOptions& opt) {
    LossValue v;
    v.bce = bce(y, yhat, mask, opt);
    v.soft_mcc = soft_mcc(y, yhat, mask, opt);
    v.composite = v.bce - v.soft_mcc;
    return v;
}

LossValue composite_loss_grad(std::span<const double> y, std::span<const double> yhat,
                              std::span<const std::uint8_t> mask, std::span<double> grad,
                              const ObjectiveOptions& opt) {
    if (grad.size() != y.size())
        raise(ErrorCategory::validation, "composite_loss_grad: grad size mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);
    LossValue v = composite_loss(y, yhat, mask, opt);
    bce_grad(y, yhat, mask, grad, opt);
    std::vector<double> mg(y.size(), 0.0);
    soft_mcc_grad(y, yhat, mask, mg, opt);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= mg[i];
    return v;
}

LossValue composite_loss_batch(std::span<const double> y, std::span<const double> yhat,
                               std::span<const std::uint8_t> mask,
                               std::span<const std::size_t> offsets,
                               std::span<double> grad_or_empty,
                               const ObjectiveOptions& opt) {
    if (!opt.mcc_per_sequence || offsets.size() <= 1) {
        if (grad_or_empty.empty()) return composite_loss(y, yhat, mask, opt);
        return composite_loss_grad(y, yhat, mask, grad_or_empty, opt);
    }
    const std::size_t nseq = offsets.size();
    LossValue total;
    if (!grad_or_empty.empty())
        std::fill(grad_or_empty.begin(), grad_or_empty.end(), 0.0);
    for (std::size_t s = 0; s < nseq; ++s) {
        const std::size_t b = offsets[s];
        const std::size_t e = s + 1 < nseq ? offsets[s + 1] : y.size();
        auto ys = y.subspan(b, e - b);
        auto ps = yhat.subspan(b, e - b);
        auto ms = mask.subspan(b, e - b);
        LossValue v;
        if (grad_or_empty.empty()) {
            v = composite_loss(ys, ps, ms, opt);
        } else {
            v = composite_loss_grad(ys, ps, ms, grad_or_empty.subspan(b, e - b), opt);
        }
        total.bce += v.bce;
        total.soft_mcc += v.soft_mcc;
    }
    const double inv = 1.0 / static_cast<double>(nseq);
    total.bce *= inv;
    total.soft_mcc *= inv;
    total.composite = total.bce - total.soft_mcc;
    if (!grad_or_empty.empty())
        for (double& g : grad_or_empty) g *= inv;
    return total;
}

}  // namespace dunet
