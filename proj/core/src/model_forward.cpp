#include <cmath>

#include "model_internal.hpp"

namespace dunet {

using detail::BlockRef;
using detail::ConvRef;
using detail::GateRef;
using detail::UpRef;
using detail::Wiring;
using detail::view;

namespace {

struct BlockTrace {
    Tensor2 in;    // block input
    Tensor2 act1;  // relu(conv1(in))
    Tensor2 act2;  // relu(conv2(act1))
    Tensor2 out;   // dropout(act2); always stored (skip/pool input)
    DropoutMask drop;
};

struct GateTrace {
    Tensor2 q;      // relu(Wx x + upsample(Wg g + bg))
    Tensor2 alpha;  // L x 1 coefficients
    Tensor2 gated;  // alpha (broadcast) * x_skip
};

struct UpTrace {
    GateTrace gate;
    Tensor2 gup;  // upsample(g)
    Tensor2 u;    // upconv(gup)
    BlockTrace block;
};

}  // namespace

struct ForwardTrace {
    int real_len = 0;
    int padded_len = 0;
    std::vector<BlockTrace> down;
    Tensor2 bottom_pooled;  // only without a dedicated bottleneck
    std::vector<UpTrace> up;
    Tensor2 probs_padded;
};

void TraceDeleter::operator()(ForwardTrace* t) const { delete t; }

namespace {

BlockTrace run_block(const ModelParams& p, const BlockRef& blk, Tensor2 in,
                     double drop_rate, RunMode mode, Rng& rng, bool keep) {
    BlockTrace t;
    Tensor2 act1 = relu(conv1d(in, view(p, blk.c1)));
    Tensor2 act2 = relu(conv1d(act1, view(p, blk.c2)));
    t.out = dropout(act2, drop_rate, rng, mode == RunMode::train, keep ? &t.drop : nullptr);
    if (keep) {
        t.in = std::move(in);
        t.act1 = std::move(act1);
        t.act2 = std::move(act2);
    }
    return t;
}

GateTrace run_gate_views(const Tensor2& x_skip, const Tensor2& gating, const GateView& g,
                         bool keep) {
    if (gating.length * 2 != x_skip.length)
        raise(ErrorCategory::validation,
              "attention_gate: gating length " + std::to_string(gating.length) +
                  " does not upsample to skip length " + std::to_string(x_skip.length));
    Tensor2 qpre = conv1d(x_skip, g.wx);
    {
        Tensor2 gwu = upsample_linear1d(conv1d(gating, g.wg));
        for (std::size_t i = 0; i < qpre.data.size(); ++i) qpre.data[i] += gwu.data[i];
    }
    GateTrace t;
    Tensor2 q = relu(qpre);
    Tensor2 alpha = sigmoid(conv1d(q, g.psi));
    t.gated = Tensor2(x_skip.length, x_skip.channels);
    for (int i = 0; i < x_skip.length; ++i) {
        const double a = alpha.at(i, 0);
        const double* xr = &x_skip.data[static_cast<std::size_t>(i) * x_skip.channels];
        double* yr = &t.gated.data[static_cast<std::size_t>(i) * x_skip.channels];
        for (int c = 0; c < x_skip.channels; ++c) yr[c] = a * xr[c];
    }
    if (keep) {
        t.q = std::move(q);
        t.alpha = std::move(alpha);
    }
    return t;
}

GateView gate_views(const ModelParams& p, const GateRef& g) {
    return {view(p, g.wx), view(p, g.wg), view(p, g.psi)};
}

TracePtr run_forward(const ModelConfig& cfg, const ModelParams& params, const Tensor2& emb,
                     const Tensor2* onehot, const ResidueMask& mask, RunMode mode, Rng& rng,
                     bool keep) {
    validate_config(cfg);
    if (params.tensors.size() != model_layout(cfg).size())
        raise(ErrorCategory::validation, "forward: params do not match config layout");
    if (emb.length > cfg.max_len)
        raise(ErrorCategory::validation,
              "forward: sequence length " + std::to_string(emb.length) +
                  " exceeds the model limit of " + std::to_string(cfg.max_len));
    if (emb.length < 1)
        raise(ErrorCategory::validation, "forward: empty sequence");
    if (emb.channels != cfg.input_dim)
        raise(ErrorCategory::validation,
              "forward: channel axis mismatch: embedding has " + std::to_string(emb.channels) +
                  " features, config expects " + std::to_string(cfg.input_dim));
    if (cfg.use_onehot_input) {
        if (!onehot)
            raise(ErrorCategory::validation, "forward: config requires a one-hot input track");
        if (onehot->length != emb.length || onehot->channels != 20)
            raise(ErrorCategory::validation, "forward: one-hot track shape mismatch");
    }
    if (static_cast<int>(mask.size()) != emb.length)
        raise(ErrorCategory::validation, "forward: mask length mismatch");

    const Wiring w = detail::build_wiring(cfg);
    auto trace = TracePtr(new ForwardTrace());
    trace->real_len = emb.length;
    const int mult = cfg.pad_multiple();
    const int padded = (emb.length + mult - 1) / mult * mult;
    trace->padded_len = padded;

    Tensor2 x = cfg.use_onehot_input ? concat_channels(emb, *onehot) : emb;
    if (padded != x.length) {
        Tensor2 xp(padded, x.channels);
        std::copy(x.data.begin(), x.data.end(), xp.data.begin());
        x = std::move(xp);
    }

    trace->down.reserve(static_cast<std::size_t>(cfg.levels));
    for (int i = 0; i < cfg.levels; ++i) {
        trace->down.push_back(run_block(params, w.down[static_cast<std::size_t>(i)],
                                        std::move(x), cfg.dropout_rate, mode, rng, keep));
        if (i + 1 < cfg.levels) x = maxpool1d(trace->down.back().out);
    }

    const Tensor2* g = nullptr;
    if (cfg.dedicated_bottleneck) {
        g = &trace->down.back().out;
    } else {
        trace->bottom_pooled = maxpool1d(trace->down.back().out);
        g = &trace->bottom_pooled;
    }

    trace->up.reserve(w.up.size());
    for (const UpRef& u : w.up) {
        const Tensor2& x_skip = trace->down[static_cast<std::size_t>(u.plan.res)].out;
        UpTrace ut;
        ut.gate = run_gate_views(x_skip, *g, gate_views(params, u.gate), keep);
        Tensor2 gup = upsample_linear1d(*g);
        Tensor2 uconv = conv1d(gup, view(params, u.upconv));
        Tensor2 cat = concat_channels(ut.gate.gated, uconv);
        ut.block = run_block(params, u.block, std::move(cat), cfg.dropout_rate, mode, rng, keep);
        if (keep) {
            ut.gup = std::move(gup);
            ut.u = std::move(uconv);
        }
        trace->up.push_back(std::move(ut));
        g = &trace->up.back().block.out;
    }

    Tensor2 logits = conv1d(*g, view(params, w.head));
    trace->probs_padded = softmax_channels(logits);
    return trace;
}

Tensor2 strip_padding(const Tensor2& padded, int real_len) {
    if (padded.length == real_len) return padded;
    Tensor2 out(real_len, padded.channels);
    std::copy(padded.data.begin(),
              padded.data.begin() + static_cast<std::ptrdiff_t>(out.size()), out.data.begin());
    return out;
}

}  // namespace

Tensor2 attention_gate(const Tensor2& x_skip, const Tensor2& g, const GateView& gate,
                       Tensor2* alpha_out) {
    GateTrace t = run_gate_views(x_skip, g, gate, alpha_out != nullptr);
    if (alpha_out) *alpha_out = std::move(t.alpha);
    return std::move(t.gated);
}

Tensor2 forward(const ModelConfig& cfg, const ModelParams& params, const Tensor2& emb,
                const Tensor2* onehot, const ResidueMask& mask, RunMode mode, Rng& rng) {
    TracePtr t = run_forward(cfg, params, emb, onehot, mask, mode, rng, /*keep=*/false);
    return strip_padding(t->probs_padded, t->real_len);
}

ForwardResult forward_trace(const ModelConfig& cfg, const ModelParams& params,
                            const Tensor2& emb, const Tensor2* onehot,
                            const ResidueMask& mask, RunMode mode, Rng& rng) {
    TracePtr t = run_forward(cfg, params, emb, onehot, mask, mode, rng, /*keep=*/true);
    ForwardResult r;
    r.probs = strip_padding(t->probs_padded, t->real_len);
    r.trace = std::move(t);
    return r;
}

namespace {

double* gw(ParamMirror& g, const ConvRef& r) {
    return g.values[static_cast<std::size_t>(r.w)].data();
}
double* gb(ParamMirror& g, const ConvRef& r) {
    return r.b >= 0 ? g.values[static_cast<std::size_t>(r.b)].data() : nullptr;
}

// Returns d(in); accumulates weight gradients.
Tensor2 block_backward(const ModelParams& p, const BlockRef& blk, const BlockTrace& t,
                       const Tensor2& d_out, double drop_rate, ParamMirror& grads) {
    Tensor2 d_act2 = dropout_backward(t.drop, drop_rate, d_out);
    Tensor2 d_pre2 = relu_backward(t.act2, d_act2);
    Tensor2 d_act1(t.act1.length, t.act1.channels);
    conv1d_backward(t.act1, view(p, blk.c2), d_pre2, &d_act1, gw(grads, blk.c2),
                    gb(grads, blk.c2));
    Tensor2 d_pre1 = relu_backward(t.act1, d_act1);
    Tensor2 d_in(t.in.length, t.in.channels);
    conv1d_backward(t.in, view(p, blk.c1), d_pre1, &d_in, gw(grads, blk.c1),
                    gb(grads, blk.c1));
    return d_in;
}

// Accumulates into d_x_skip and d_g (both pre-sized).
void gate_backward(const ModelParams& p, const GateRef& g, const GateTrace& t,
                   const Tensor2& x_skip, const Tensor2& g_in, const Tensor2& d_gated,
                   Tensor2& d_x_skip, Tensor2& d_g, ParamMirror& grads) {
    const int L = x_skip.length, C = x_skip.channels;
    Tensor2 d_alpha(L, 1);
    for (int i = 0; i < L; ++i) {
        const double a = t.alpha.at(i, 0);
        const double* dr = &d_gated.data[static_cast<std::size_t>(i) * C];
        const double* xr = &x_skip.data[static_cast<std::size_t>(i) * C];
        double* dxr = &d_x_skip.data[static_cast<std::size_t>(i) * C];
        double acc = 0.0;
        for (int c = 0; c < C; ++c) {
            acc += dr[c] * xr[c];
            dxr[c] += dr[c] * a;
        }
        d_alpha.at(i, 0) = acc;
    }
    Tensor2 d_spre = sigmoid_backward(t.alpha, d_alpha);
    Tensor2 d_q(t.q.length, t.q.channels);
    conv1d_backward(t.q, view(p, g.psi), d_spre, &d_q, gw(grads, g.psi), gb(grads, g.psi));
    Tensor2 d_qpre = relu_backward(t.q, d_q);
    // qpre = Wx*x_skip + upsample(Wg*g_in + bg): the cotangent splits to both
    conv1d_backward(x_skip, view(p, g.wx), d_qpre, &d_x_skip, gw(grads, g.wx), nullptr);
    Tensor2 d_gw = upsample_linear1d_backward(d_qpre, g_in.length);
    conv1d_backward(g_in, view(p, g.wg), d_gw, &d_g, gw(grads, g.wg), gb(grads, g.wg));
}

void accum(Tensor2& dst, const Tensor2& src) {
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

}  // namespace

void backward(const ModelConfig& cfg, const ModelParams& params, const ForwardTrace& trace,
              const Tensor2& dprobs, ParamMirror& grads) {
    if (grads.values.size() != params.tensors.size())
        raise(ErrorCategory::validation, "backward: gradient mirror shape mismatch");
    if (dprobs.length != trace.real_len || dprobs.channels != cfg.num_classes)
        raise(ErrorCategory::validation, "backward: cotangent shape mismatch");
    const Wiring w = detail::build_wiring(cfg);

    Tensor2 dprobs_padded(trace.padded_len, cfg.num_classes);
    std::copy(dprobs.data.begin(), dprobs.data.end(), dprobs_padded.data.begin());
    Tensor2 d_logits = softmax_channels_backward(trace.probs_padded, dprobs_padded);

    const Tensor2& feat_final = trace.up.back().block.out;
    Tensor2 d_feat(feat_final.length, feat_final.channels);
    conv1d_backward(feat_final, view(params, w.head), d_logits, &d_feat, gw(grads, w.head),
                    gb(grads, w.head));

    std::vector<Tensor2> d_down(trace.down.size());
    for (std::size_t i = 0; i < trace.down.size(); ++i)
        d_down[i] = Tensor2(trace.down[i].out.length, trace.down[i].out.channels);

    for (std::size_t k = trace.up.size(); k-- > 0;) {
        const UpRef& u = w.up[k];
        const UpTrace& ut = trace.up[k];
        const Tensor2& x_skip = trace.down[static_cast<std::size_t>(u.plan.res)].out;
        const Tensor2& g_in = k == 0 ? (cfg.dedicated_bottleneck ? trace.down.back().out
                                                                 : trace.bottom_pooled)
                                     : trace.up[k - 1].block.out;

        Tensor2 d_cat = block_backward(params, u.block, ut.block, d_feat, cfg.dropout_rate, grads);
        auto [d_gated, d_u] = split_channels(d_cat, u.plan.skip_ch);

        Tensor2 d_gup(ut.gup.length, ut.gup.channels);
        conv1d_backward(ut.gup, view(params, u.upconv), d_u, &d_gup, gw(grads, u.upconv),
                        gb(grads, u.upconv));
        Tensor2 d_g = upsample_linear1d_backward(d_gup, g_in.length);

        gate_backward(params, u.gate, ut.gate, x_skip, g_in, d_gated,
                      d_down[static_cast<std::size_t>(u.plan.res)], d_g, grads);

        if (k == 0) {
            if (cfg.dedicated_bottleneck) {
                accum(d_down.back(), d_g);
            } else {
                accum(d_down.back(), maxpool1d_backward(trace.down.back().out, d_g));
            }
        } else {
            d_feat = std::move(d_g);
        }
    }

    for (std::size_t i = trace.down.size(); i-- > 0;) {
        Tensor2 d_in = block_backward(params, w.down[i], trace.down[i], d_down[i],
                                      cfg.dropout_rate, grads);
        if (i > 0) accum(d_down[i - 1], maxpool1d_backward(trace.down[i - 1].out, d_in));
    }
}

}  // namespace dunet
