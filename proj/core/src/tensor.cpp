#include "dunet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dunet {

namespace {
void require(bool ok, const std::string& msg) {
    if (!ok) raise(ErrorCategory::validation, msg);
}
}  // namespace

Tensor2 conv1d(const Tensor2& x, const ConvView& cv) {
    require(cv.kernel_len >= 1, "conv1d: kernel length must be positive");
    require(x.channels == cv.in_channels,
            "conv1d: channel axis mismatch: input has " + std::to_string(x.channels) +
                " channels, kernel expects " + std::to_string(cv.in_channels));
    const int L = x.length, K = cv.kernel_len, cin = cv.in_channels, cout = cv.out_channels;
    const int pad = (K - 1) / 2;
    Tensor2 y(L, cout);
    if (cv.b) {
        for (int i = 0; i < L; ++i) {
            double* yr = &y.data[static_cast<std::size_t>(i) * cout];
            for (int o = 0; o < cout; ++o) yr[o] = cv.b[o];
        }
    }
    for (int i = 0; i < L; ++i) {
        double* yr = &y.data[static_cast<std::size_t>(i) * cout];
        for (int k = 0; k < K; ++k) {
            const int src = i + k - pad;
            if (src < 0 || src >= L) continue;
            const double* xr = &x.data[static_cast<std::size_t>(src) * cin];
            const double* wk = cv.w + static_cast<std::size_t>(k) * cin * cout;
            for (int c = 0; c < cin; ++c) {
                const double xv = xr[c];
                if (xv == 0.0) continue;
                const double* wr = wk + static_cast<std::size_t>(c) * cout;
                for (int o = 0; o < cout; ++o) yr[o] += xv * wr[o];
            }
        }
    }
    return y;
}

void conv1d_backward(const Tensor2& x, const ConvView& cv, const Tensor2& dy,
                     Tensor2* dx, double* dw, double* db) {
    const int L = x.length, K = cv.kernel_len, cin = cv.in_channels, cout = cv.out_channels;
    require(dy.length == L && dy.channels == cout,
            "conv1d_backward: cotangent shape mismatch");
    const int pad = (K - 1) / 2;
    if (db && cv.b) {
        for (int i = 0; i < L; ++i) {
            const double* dr = &dy.data[static_cast<std::size_t>(i) * cout];
            for (int o = 0; o < cout; ++o) db[o] += dr[o];
        }
    }
    for (int i = 0; i < L; ++i) {
        const double* dr = &dy.data[static_cast<std::size_t>(i) * cout];
        for (int k = 0; k < K; ++k) {
            const int src = i + k - pad;
            if (src < 0 || src >= L) continue;
            const double* xr = &x.data[static_cast<std::size_t>(src) * cin];
            const double* wk = cv.w + static_cast<std::size_t>(k) * cin * cout;
            double* dwk = dw ? dw + static_cast<std::size_t>(k) * cin * cout : nullptr;
            double* dxr = dx ? &dx->data[static_cast<std::size_t>(src) * cin] : nullptr;
            for (int c = 0; c < cin; ++c) {
                const double* wr = wk + static_cast<std::size_t>(c) * cout;
                double acc = 0.0;
                if (dwk) {
                    double* dwr = dwk + static_cast<std::size_t>(c) * cout;
                    const double xv = xr[c];
                    for (int o = 0; o < cout; ++o) {
                        dwr[o] += xv * dr[o];
                        acc += wr[o] * dr[o];
                    }
                } else {
                    for (int o = 0; o < cout; ++o) acc += wr[o] * dr[o];
                }
                if (dxr) dxr[c] += acc;
            }
        }
    }
}

Tensor2 relu(const Tensor2& x) {
    Tensor2 y = x;
    for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor2 relu_backward(const Tensor2& x, const Tensor2& dy) {
    require(x.same_shape(dy), "relu_backward: shape mismatch");
    Tensor2 dx(x.length, x.channels);
    for (std::size_t i = 0; i < x.data.size(); ++i)
        dx.data[i] = x.data[i] > 0.0 ? dy.data[i] : 0.0;
    return dx;
}

Tensor2 sigmoid(const Tensor2& x) {
    Tensor2 y = x;
    for (double& v : y.data) {
        if (v >= 0.0) {
            v = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            v = e / (1.0 + e);
        }
    }
    return y;
}

Tensor2 sigmoid_backward(const Tensor2& y, const Tensor2& dy) {
    require(y.same_shape(dy), "sigmoid_backward: shape mismatch");
    Tensor2 dx(y.length, y.channels);
    for (std::size_t i = 0; i < y.data.size(); ++i)
        dx.data[i] = dy.data[i] * y.data[i] * (1.0 - y.data[i]);
    return dx;
}

Tensor2 softmax_channels(const Tensor2& x) {
    Tensor2 y(x.length, x.channels);
    const int C = x.channels;
    for (int i = 0; i < x.length; ++i) {
        const double* xr = &x.data[static_cast<std::size_t>(i) * C];
        double* yr = &y.data[static_cast<std::size_t>(i) * C];
        double m = xr[0];
        for (int c = 1; c < C; ++c) m = std::max(m, xr[c]);
        double sum = 0.0;
        for (int c = 0; c < C; ++c) {
            yr[c] = std::exp(xr[c] - m);
            sum += yr[c];
        }
        for (int c = 0; c < C; ++c) yr[c] /= sum;
    }
    return y;
}

Tensor2 softmax_channels_backward(const Tensor2& y, const Tensor2& dy) {
    require(y.same_shape(dy), "softmax_channels_backward: shape mismatch");
    Tensor2 dx(y.length, y.channels);
    const int C = y.channels;
    for (int i = 0; i < y.length; ++i) {
        const double* yr = &y.data[static_cast<std::size_t>(i) * C];
        const double* dr = &dy.data[static_cast<std::size_t>(i) * C];
        double dot = 0.0;
        for (int c = 0; c < C; ++c) dot += dr[c] * yr[c];
        double* dxr = &dx.data[static_cast<std::size_t>(i) * C];
        for (int c = 0; c < C; ++c) dxr[c] = yr[c] * (dr[c] - dot);
    }
    return dx;
}

Tensor2 maxpool1d(const Tensor2& x) {
    if (x.length % 2 != 0)
        raise(ErrorCategory::validation,
              "maxpool1d: length axis must be even (padding contract violated), got " +
                  std::to_string(x.length));
    const int C = x.channels;
    Tensor2 y(x.length / 2, C);
    for (int i = 0; i < y.length; ++i) {
        const double* a = &x.data[static_cast<std::size_t>(2 * i) * C];
        const double* b = a + C;
        double* yr = &y.data[static_cast<std::size_t>(i) * C];
        for (int c = 0; c < C; ++c) yr[c] = a[c] >= b[c] ? a[c] : b[c];
    }
    return y;
}

Tensor2 maxpool1d_backward(const Tensor2& x, const Tensor2& dy) {
    require(x.length % 2 == 0 && dy.length == x.length / 2 && dy.channels == x.channels,
            "maxpool1d_backward: shape mismatch");
    const int C = x.channels;
    Tensor2 dx(x.length, C);
    for (int i = 0; i < dy.length; ++i) {
        const double* a = &x.data[static_cast<std::size_t>(2 * i) * C];
        const double* b = a + C;
        double* da = &dx.data[static_cast<std::size_t>(2 * i) * C];
        double* db2 = da + C;
        const double* dr = &dy.data[static_cast<std::size_t>(i) * C];
        for (int c = 0; c < C; ++c) {
            if (a[c] >= b[c]) da[c] = dr[c];  // tie goes to the lower index
            else db2[c] = dr[c];
        }
    }
    return dx;
}

Tensor2 upsample_linear1d(const Tensor2& x) {
    const int L = x.length, C = x.channels;
    require(L >= 1, "upsample_linear1d: empty input");
    Tensor2 y(2 * L, C);
    for (int j = 0; j < 2 * L; ++j) {
        double s = 0.5 * j;
        if (s > L - 1) s = L - 1;
        const int i0 = static_cast<int>(s);
        const int i1 = std::min(i0 + 1, L - 1);
        const double t = s - i0;
        const double* r0 = &x.data[static_cast<std::size_t>(i0) * C];
        const double* r1 = &x.data[static_cast<std::size_t>(i1) * C];
        double* yr = &y.data[static_cast<std::size_t>(j) * C];
        for (int c = 0; c < C; ++c) yr[c] = (1.0 - t) * r0[c] + t * r1[c];
    }
    return y;
}

Tensor2 upsample_linear1d_backward(const Tensor2& dy, int input_len) {
    const int L = input_len, C = dy.channels;
    require(dy.length == 2 * L, "upsample_linear1d_backward: cotangent length mismatch");
    Tensor2 dx(L, C);
    for (int j = 0; j < 2 * L; ++j) {
        double s = 0.5 * j;
        if (s > L - 1) s = L - 1;
        const int i0 = static_cast<int>(s);
        const int i1 = std::min(i0 + 1, L - 1);
        const double t = s - i0;
        const double* dr = &dy.data[static_cast<std::size_t>(j) * C];
        double* d0 = &dx.data[static_cast<std::size_t>(i0) * C];
        double* d1 = &dx.data[static_cast<std::size_t>(i1) * C];
        for (int c = 0; c < C; ++c) {
            d0[c] += (1.0 - t) * dr[c];
            d1[c] += t * dr[c];
        }
    }
    return dx;
}

Tensor2 dropout(const Tensor2& x, double rate, Rng& rng, bool training,
                DropoutMask* mask_out) {
    if (!(rate >= 0.0 && rate < 1.0))
        raise(ErrorCategory::validation,
              "dropout: rate must lie in [0, 1), got " + std::to_string(rate));
    if (!training || rate == 0.0) {
        if (mask_out) mask_out->assign(x.data.size(), 1);
        return x;
    }
    const double scale = 1.0 / (1.0 - rate);
    Tensor2 y(x.length, x.channels);
    if (mask_out) mask_out->assign(x.data.size(), 0);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        if (rng.next_double() >= rate) {
            y.data[i] = x.data[i] * scale;
            if (mask_out) (*mask_out)[i] = 1;
        }
    }
    return y;
}

Tensor2 dropout_backward(const DropoutMask& kept, double rate, const Tensor2& dy) {
    require(kept.size() == dy.data.size(), "dropout_backward: mask size mismatch");
    const double scale = rate == 0.0 ? 1.0 : 1.0 / (1.0 - rate);
    Tensor2 dx(dy.length, dy.channels);
    for (std::size_t i = 0; i < dy.data.size(); ++i)
        dx.data[i] = kept[i] ? dy.data[i] * scale : 0.0;
    return dx;
}

Tensor2 concat_channels(const Tensor2& a, const Tensor2& b) {
    if (a.length != b.length)
        raise(ErrorCategory::validation,
              "concat_channels: length axis mismatch: " + std::to_string(a.length) +
                  " vs " + std::to_string(b.length));
    Tensor2 y(a.length, a.channels + b.channels);
    for (int i = 0; i < a.length; ++i) {
        double* yr = &y.data[static_cast<std::size_t>(i) * y.channels];
        const double* ar = &a.data[static_cast<std::size_t>(i) * a.channels];
        const double* br = &b.data[static_cast<std::size_t>(i) * b.channels];
        std::copy(ar, ar + a.channels, yr);
        std::copy(br, br + b.channels, yr + a.channels);
    }
    return y;
}

std::pair<Tensor2, Tensor2> split_channels(const Tensor2& x, int ca) {
    require(ca >= 0 && ca <= x.channels, "split_channels: bad split point");
    const int cb = x.channels - ca;
    Tensor2 a(x.length, ca), b(x.length, cb);
    for (int i = 0; i < x.length; ++i) {
        const double* xr = &x.data[static_cast<std::size_t>(i) * x.channels];
        std::copy(xr, xr + ca, &a.data[static_cast<std::size_t>(i) * ca]);
        std::copy(xr + ca, xr + x.channels, &b.data[static_cast<std::size_t>(i) * cb]);
    }
    return {std::move(a), std::move(b)};
}

}  // namespace dunet
