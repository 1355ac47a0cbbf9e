#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dunet/model.hpp"

namespace dunet::detail {

inline int gate_width(const ModelConfig& cfg, int skip_channels) {
    return cfg.gate_half_width ? std::max(1, skip_channels / 2) : skip_channels;
}

// Up-path groups, deepest first: output resolution, skip channels, gating channels.
struct UpPlan {
    int res;
    int skip_ch;
    int gate_ch;
};

inline std::vector<UpPlan> up_plan(const ModelConfig& cfg) {
    std::vector<UpPlan> plan;
    const auto& f = cfg.filters_per_level;
    const int n = cfg.levels;
    if (!cfg.dedicated_bottleneck) {
        // every block keeps a skip; the deepest gating signal is the pooled
        // output of the deepest block itself
        plan.push_back({n - 1, f[n - 1], f[n - 1]});
    }
    for (int j = n - 2; j >= 0; --j) plan.push_back({j, f[j], f[j + 1]});
    return plan;
}

// Index of a conv layer's tensors inside ModelParams (b == -1 when bias-free).
struct ConvRef {
    int w = -1;
    int b = -1;
    int k = 0, cin = 0, cout = 0;
};

struct BlockRef {
    ConvRef c1, c2;
};

struct GateRef {
    ConvRef wx, wg, psi;
};

struct UpRef {
    UpPlan plan;
    GateRef gate;
    ConvRef upconv;
    BlockRef block;
};

struct Wiring {
    std::vector<BlockRef> down;
    std::vector<UpRef> up;
    ConvRef head;
};

// Single source of truth for tensor enumeration order. The callback sees
// each conv in the exact order model_layout() emits tensors.
template <typename Fn>
void walk_convs(const ModelConfig& cfg, Fn&& fn) {
    const auto& f = cfg.filters_per_level;
    const int K = cfg.kernel_len;
    int cin = cfg.effective_input_dim();
    for (int i = 0; i < cfg.levels; ++i) {
        const std::string blk = "down" + std::to_string(i);
        fn(blk + ".conv1", K, cin, f[i], true);
        fn(blk + ".conv2", K, f[i], f[i], true);
        cin = f[i];
    }
    for (const UpPlan& p : up_plan(cfg)) {
        const std::string blk = "up" + std::to_string(p.res);
        const int fint = gate_width(cfg, p.skip_ch);
        fn(blk + ".gate.wx", 1, p.skip_ch, fint, false);
        fn(blk + ".gate.wg", 1, p.gate_ch, fint, true);
        fn(blk + ".gate.psi", 1, fint, 1, true);
        fn(blk + ".upconv", cfg.up_kernel_len, p.gate_ch, p.skip_ch, true);
        fn(blk + ".conv1", K, 2 * p.skip_ch, p.skip_ch, true);
        fn(blk + ".conv2", K, p.skip_ch, p.skip_ch, true);
    }
    fn("head", 1, f[0], cfg.num_classes, true);
}

Wiring build_wiring(const ModelConfig& cfg);

inline ConvView view(const ModelParams& p, const ConvRef& r) {
    ConvView v;
    v.kernel_len = r.k;
    v.in_channels = r.cin;
    v.out_channels = r.cout;
    v.w = p.tensors[static_cast<std::size_t>(r.w)].values.data();
    v.b = r.b >= 0 ? p.tensors[static_cast<std::size_t>(r.b)].values.data() : nullptr;
    return v;
}

}  // namespace dunet::detail
