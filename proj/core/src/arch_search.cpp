#include <algorithm>

#include "dunet/model.hpp"

namespace dunet {

std::vector<ArchCandidate> search_architectures(long long target_params) {
    std::vector<ArchCandidate> out;
    for (int levels = 3; levels <= 6; ++levels) {
        // nondecreasing schemes over {32, 64}: k shallow 32-levels, rest 64
        for (int k32 = 0; k32 <= levels; ++k32) {
            std::vector<int> filters;
            for (int i = 0; i < levels; ++i) filters.push_back(i < k32 ? 32 : 64);
            for (int up_k : {2, 7}) {
                for (bool half : {false, true}) {
                    for (bool bottleneck : {true, false}) {
                        ModelConfig cfg;
                        cfg.levels = levels;
                        cfg.filters_per_level = filters;
                        cfg.up_kernel_len = up_k;
                        cfg.gate_half_width = half;
                        cfg.dedicated_bottleneck = bottleneck;
                        ArchCandidate cand;
                        cand.config = cfg;
                        cand.params = param_count(cfg);
                        cand.distance = std::abs(cand.params - target_params);
                        out.push_back(std::move(cand));
                    }
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const ArchCandidate& a, const ArchCandidate& b) {
        return a.distance < b.distance;
    });
    return out;
}

ModelConfig reference_config() {
    // Best search match against the published trainable-parameter total:
    // 629,029 vs 628,710 (+319, +0.051%); see README for the discrepancy note.
    ModelConfig cfg;
    cfg.input_dim = 1024;
    cfg.levels = 4;
    cfg.filters_per_level = {32, 64, 64, 64};
    cfg.kernel_len = 7;
    cfg.up_kernel_len = 2;
    cfg.gate_half_width = false;
    cfg.dedicated_bottleneck = true;
    cfg.dropout_rate = 0.25;
    cfg.num_classes = 2;
    cfg.max_len = 7168;
    return cfg;
}

}  // namespace dunet
