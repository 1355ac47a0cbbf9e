#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dunet/common.hpp"

namespace dunet {

// Row-major L x C tensor: residue axis first, feature channels second.
struct Tensor2 {
    int length = 0;
    int channels = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(int len, int ch, double fill = 0.0)
        : length(len), channels(ch),
          data(static_cast<std::size_t>(len) * static_cast<std::size_t>(ch), fill) {}

    double& at(int i, int c) { return data[static_cast<std::size_t>(i) * channels + c]; }
    double at(int i, int c) const { return data[static_cast<std::size_t>(i) * channels + c]; }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor2& o) const {
        return length == o.length && channels == o.channels;
    }
};

// Value/cotangent pair; grad always mirrors value's shape.
struct GradPair {
    Tensor2 value;
    Tensor2 grad;
};

// Non-owning view of one conv layer's weights. w has layout [k][cin][cout]
// (cout contiguous); b may be null for bias-free 1x1 convs.
struct ConvView {
    int kernel_len = 0;
    int in_channels = 0;
    int out_channels = 0;
    const double* w = nullptr;
    const double* b = nullptr;
};

// Same-length conv with zero padding. Odd kernels pad symmetrically
// (center tap at the output position); even kernels pad one less on the
// left, so a K=2 kernel reads positions [i, i+1].
Tensor2 conv1d(const Tensor2& x, const ConvView& cv);
// Accumulates into dx/dw/db (callers zero them once per step); dx/dw/db
// may each be null.
void conv1d_backward(const Tensor2& x, const ConvView& cv, const Tensor2& dy,
                     Tensor2* dx, double* dw, double* db);

Tensor2 relu(const Tensor2& x);
Tensor2 relu_backward(const Tensor2& x, const Tensor2& dy);  // subgradient 0 at 0

Tensor2 sigmoid(const Tensor2& x);
Tensor2 sigmoid_backward(const Tensor2& y, const Tensor2& dy);  // y = sigmoid output

Tensor2 softmax_channels(const Tensor2& x);
Tensor2 softmax_channels_backward(const Tensor2& y, const Tensor2& dy);

// window=2 stride=2; requires even length. Ties route to the lower index.
Tensor2 maxpool1d(const Tensor2& x);
Tensor2 maxpool1d_backward(const Tensor2& x, const Tensor2& dy);

// Length doubling; output index j reads source coordinate j/2 clamped to
// [0, L-1] with linear interpolation (endpoint replicating).
Tensor2 upsample_linear1d(const Tensor2& x);
Tensor2 upsample_linear1d_backward(const Tensor2& dy, int input_len);

// Inverted dropout; keep mask is emitted for the backward pass. Inference
// mode is the bitwise identity and consumes no randomness.
using DropoutMask = std::vector<std::uint8_t>;
Tensor2 dropout(const Tensor2& x, double rate, Rng& rng, bool training,
                DropoutMask* mask_out = nullptr);
Tensor2 dropout_backward(const DropoutMask& kept, double rate, const Tensor2& dy);

Tensor2 concat_channels(const Tensor2& a, const Tensor2& b);
std::pair<Tensor2, Tensor2> split_channels(const Tensor2& x, int ca);

}  // namespace dunet
