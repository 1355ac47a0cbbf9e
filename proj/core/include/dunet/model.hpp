#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "dunet/common.hpp"
#include "dunet/datasets.hpp"
#include "dunet/tensor.hpp"

namespace dunet {

struct ModelConfig {
    int input_dim = 1024;
    int levels = 4;
    std::vector<int> filters_per_level = {32, 64, 64, 64};
    int kernel_len = 7;
    int up_kernel_len = 2;          // conv after each 2x upsample
    bool gate_half_width = false;   // gate width = skip channels (or half)
    bool dedicated_bottleneck = true;  // deepest block has no skip connection
    double dropout_rate = 0.25;
    bool use_onehot_input = false;  // concatenates a 20-channel one-hot track
    int num_classes = 2;
    int max_len = 7168;

    int effective_input_dim() const { return input_dim + (use_onehot_input ? 20 : 0); }
    // Sequences are zero-padded up to a multiple of this before the net runs.
    int pad_multiple() const { return 1 << (dedicated_bottleneck ? levels - 1 : levels); }
};

void validate_config(const ModelConfig& cfg);

struct TensorSpec {
    std::string name;
    std::vector<int> dims;
    std::size_t size() const {
        std::size_t s = 1;
        for (int d : dims) s *= static_cast<std::size_t>(d);
        return s;
    }
};

struct ParamTensor {
    TensorSpec spec;
    std::vector<double> values;
};

struct ModelParams {
    std::vector<ParamTensor> tensors;
    std::size_t scalar_count() const {
        std::size_t s = 0;
        for (const auto& t : tensors) s += t.values.size();
        return s;
    }
};

// Mirrors ModelParams tensor-for-tensor (gradients, Adam moments).
struct ParamMirror {
    std::vector<std::vector<double>> values;
    static ParamMirror zeros_like(const ModelParams& p);
    void zero();
};

std::vector<TensorSpec> model_layout(const ModelConfig& cfg);
long long param_count(const ModelConfig& cfg);
ModelParams init_model(const ModelConfig& cfg, std::uint64_t seed);

// Per-residue mask: true = real residue; real residues form a prefix.
using ResidueMask = std::vector<std::uint8_t>;
ResidueMask prefix_mask(int real_len, int total_len);

enum class RunMode { train, infer };

// Additive attention gate over one skip connection. g comes from the next
// coarser scale (half length). Exposed for direct testing; alpha_out, when
// given, receives the per-residue coefficients.
struct GateView {
    ConvView wx;   // skip -> gate width, no bias
    ConvView wg;   // gating -> gate width, with bias
    ConvView psi;  // gate width -> 1, with bias
};
Tensor2 attention_gate(const Tensor2& x_skip, const Tensor2& g, const GateView& gate,
                       Tensor2* alpha_out = nullptr);

// Forward pass for one sequence; emb is the standardized feature matrix,
// onehot required iff cfg.use_onehot_input. Returns L x num_classes
// probabilities with padding stripped.
Tensor2 forward(const ModelConfig& cfg, const ModelParams& params, const Tensor2& emb,
                const Tensor2* onehot, const ResidueMask& mask, RunMode mode, Rng& rng);

// Training-mode forward that keeps every intermediate needed by backward.
struct ForwardTrace;
struct TraceDeleter { void operator()(ForwardTrace*) const; };
using TracePtr = std::unique_ptr<ForwardTrace, TraceDeleter>;

struct ForwardResult {
    Tensor2 probs;  // real rows only
    TracePtr trace;
};
ForwardResult forward_trace(const ModelConfig& cfg, const ModelParams& params,
                            const Tensor2& emb, const Tensor2* onehot,
                            const ResidueMask& mask, RunMode mode, Rng& rng);

// Accumulates parameter gradients for one sequence given d(loss)/d(probs)
// over the real rows (same shape as ForwardResult::probs).
void backward(const ModelConfig& cfg, const ModelParams& params, const ForwardTrace& trace,
              const Tensor2& dprobs, ParamMirror& grads);

// --- Checkpoint io -------------------------------------------------------

struct Checkpoint {
    ModelConfig config;
    ModelParams params;
    Standardizer standardizer;  // identity if never fitted
};

void save_params(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_params(const std::filesystem::path& path);

// --- Architecture search ---------------------------------------------------

// Enumerates the template space (levels 3..6, nondecreasing {32,64} filter
// schemes, bottleneck presence, up-conv kernel {2,7}, gate width) and ranks
// candidates by |param_count - target|; deterministic ordering.
struct ArchCandidate {
    ModelConfig config;
    long long params = 0;
    long long distance = 0;
};
std::vector<ArchCandidate> search_architectures(long long target_params = 628710);
ModelConfig reference_config();  // best search match; the library default

}  // namespace dunet
