#include <cmath>

#include "model_internal.hpp"

namespace dunet {

void validate_config(const ModelConfig& cfg) {
    auto bad = [&](const std::string& msg) {
        raise(ErrorCategory::validation, "ModelConfig: " + msg);
    };
    if (cfg.input_dim < 1) bad("input_dim must be positive");
    if (cfg.levels < 2) bad("levels must be at least 2");
    if (static_cast<int>(cfg.filters_per_level.size()) != cfg.levels)
        bad("filters_per_level must have exactly `levels` entries");
    for (int f : cfg.filters_per_level)
        if (f < 1) bad("filters_per_level entries must be positive");
    if (cfg.kernel_len < 1 || cfg.kernel_len % 2 == 0) bad("kernel_len must be odd");
    if (cfg.up_kernel_len < 1) bad("up_kernel_len must be positive");
    if (!(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0))
        bad("dropout_rate must lie in [0,1)");
    if (cfg.num_classes < 2) bad("num_classes must be at least 2");
    if (cfg.max_len < 1) bad("max_len must be positive");
    if (cfg.max_len % cfg.pad_multiple() != 0)
        bad("max_len must be divisible by " + std::to_string(cfg.pad_multiple()));
}

std::vector<TensorSpec> model_layout(const ModelConfig& cfg) {
    validate_config(cfg);
    std::vector<TensorSpec> specs;
    detail::walk_convs(cfg, [&](const std::string& name, int k, int cin, int cout, bool bias) {
        specs.push_back({name + ".w", {k, cin, cout}});
        if (bias) specs.push_back({name + ".b", {cout}});
    });
    return specs;
}

namespace detail {
Wiring build_wiring(const ModelConfig& cfg) {
    Wiring w;
    w.down.resize(static_cast<std::size_t>(cfg.levels));
    const auto plan = up_plan(cfg);
    w.up.resize(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) w.up[i].plan = plan[i];

    int idx = 0;
    int down_i = 0, down_conv = 0;
    std::size_t up_i = 0;
    int up_conv = 0;
    walk_convs(cfg, [&](const std::string&, int k, int cin, int cout, bool bias) {
        ConvRef r;
        r.k = k;
        r.cin = cin;
        r.cout = cout;
        r.w = idx++;
        r.b = bias ? idx++ : -1;
        if (down_i < cfg.levels) {
            (down_conv == 0 ? w.down[down_i].c1 : w.down[down_i].c2) = r;
            if (++down_conv == 2) {
                down_conv = 0;
                ++down_i;
            }
        } else if (up_i < w.up.size()) {
            UpRef& u = w.up[up_i];
            switch (up_conv) {
                case 0: u.gate.wx = r; break;
                case 1: u.gate.wg = r; break;
                case 2: u.gate.psi = r; break;
                case 3: u.upconv = r; break;
                case 4: u.block.c1 = r; break;
                case 5: u.block.c2 = r; break;
            }
            if (++up_conv == 6) {
                up_conv = 0;
                ++up_i;
            }
        } else {
            w.head = r;
        }
    });
    return w;
}
}  // namespace detail

long long param_count(const ModelConfig& cfg) {
    long long total = 0;
    for (const auto& s : model_layout(cfg)) total += static_cast<long long>(s.size());
    return total;
}

ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed) {
    const auto specs = model_layout(cfg);
    Rng rng = Rng::derive(seed, 0x6D6F64656CULL);
    ModelParams params;
    params.tensors.reserve(specs.size());
    for (const auto& spec : specs) {
        ParamTensor t;
        t.spec = spec;
        t.values.assign(spec.size(), 0.0);
        if (spec.dims.size() == 3) {
            // fan-in scaled uniform kernels, biases stay zero
            const double fan_in = static_cast<double>(spec.dims[0]) * spec.dims[1];
            const double limit = std::sqrt(6.0 / fan_in);
            for (double& v : t.values) v = rng.next_uniform(-limit, limit);
        }
        params.tensors.push_back(std::move(t));
    }
    return params;
}

ParamMirror ParamMirror::zeros_like(const ModelParams& p) {
    ParamMirror m;
    m.values.reserve(p.tensors.size());
    for (const auto& t : p.tensors) m.values.emplace_back(t.values.size(), 0.0);
    return m;
}

void ParamMirror::zero() {
    for (auto& v : values) std::fill(v.begin(), v.end(), 0.0);
}

ResidueMask prefix_mask(int real_len, int total_len) {
    if (real_len < 0 || real_len > total_len)
        raise(ErrorCategory::validation, "prefix_mask: real length outside [0, total]");
    ResidueMask m(static_cast<std::size_t>(total_len), 0);
    std::fill(m.begin(), m.begin() + real_len, 1);
    return m;
}

}  // namespace dunet
