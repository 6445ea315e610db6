#pragma once

#include <algorithm>
#include <cstring>
#include <memory>
#include <vector>

#include "cinekit/graph.hpp"

namespace ck {
namespace detail {

/// C(MxN) += A(MxK) * B(KxN), all row-major. Tiled over K and N so the
/// active B panel stays cache-resident; the inner loop is a contiguous AXPY.
inline void gemm_ab(int m, int n, int k, const double* a, const double* b, double* c) {
    constexpr int kt = 64, nt = 2048;
    for (int k0 = 0; k0 < k; k0 += kt) {
        const int k1 = std::min(k0 + kt, k);
        for (int j0 = 0; j0 < n; j0 += nt) {
            const int j1 = std::min(j0 + nt, n);
            for (int i = 0; i < m; ++i) {
                const double* arow = a + static_cast<std::size_t>(i) * k;
                double* crow = c + static_cast<std::size_t>(i) * n;
                for (int kk = k0; kk < k1; ++kk) {
                    const double av = arow[kk];
                    if (av == 0.0) continue;
                    const double* brow = b + static_cast<std::size_t>(kk) * n;
                    for (int j = j0; j < j1; ++j) crow[j] += av * brow[j];
                }
            }
        }
    }
}

/// C(MxK) += A(MxN) * B(KxN)^T; both operands traversed along contiguous rows.
inline void gemm_abt(int m, int k, int n, const double* a, const double* b, double* c) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * n;
        double* crow = c + static_cast<std::size_t>(i) * k;
        for (int j = 0; j < k; ++j) {
            const double* brow = b + static_cast<std::size_t>(j) * n;
            double s = 0.0;
            for (int p = 0; p < n; ++p) s += arow[p] * brow[p];
            crow[j] += s;
        }
    }
}

/// C(KxN) += A(MxK)^T * B(MxN).
inline void gemm_atb(int m, int k, int n, const double* a, const double* b, double* c) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * k;
        const double* brow = b + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            if (av == 0.0) continue;
            double* crow = c + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

struct ConvDims {
    int n, c, t, h, w;        // input
    int f, kt, kh, kw;        // kernel
    int stride, pad;
    int to, ho, wo;           // output
    std::int64_t k;           // patch rows = c*kt*kh*kw
    std::int64_t p;           // output positions per item = to*ho*wo
};

inline ConvDims conv_dims(const std::vector<int>& xs, const std::vector<int>& ws, int stride,
                          int pad) {
    check_arg(xs.size() == 5, "conv3d input must be (N,C,T,H,W)");
    check_arg(ws.size() == 5, "conv3d kernel must be (F,C,kt,kh,kw)");
    ConvDims d{};
    d.n = xs[0];
    d.c = xs[1];
    d.t = xs[2];
    d.h = xs[3];
    d.w = xs[4];
    d.f = ws[0];
    d.kt = ws[2];
    d.kh = ws[3];
    d.kw = ws[4];
    check_arg(ws[1] == d.c, "conv3d kernel channel count must match input");
    check_arg(stride >= 1, "conv3d stride must be >= 1");
    check_arg(pad >= 0, "conv3d padding must be >= 0");
    check_arg(d.kt >= 1 && d.kh >= 1 && d.kw >= 1, "conv3d kernel extents must be >= 1");
    d.stride = stride;
    d.pad = pad;
    d.to = (d.t + 2 * pad - d.kt) / stride + 1;
    d.ho = (d.h + 2 * pad - d.kh) / stride + 1;
    d.wo = (d.w + 2 * pad - d.kw) / stride + 1;
    check_arg(d.t + 2 * pad >= d.kt && d.h + 2 * pad >= d.kh && d.w + 2 * pad >= d.kw,
              "conv3d kernel larger than padded input");
    d.k = static_cast<std::int64_t>(d.c) * d.kt * d.kh * d.kw;
    d.p = static_cast<std::int64_t>(d.to) * d.ho * d.wo;
    return d;
}

/// Number of output positions per im2col tile, bounded so the patch matrix
/// stays within a few tens of megabytes.
inline int conv_tile_cols(const ConvDims& d) {
    const std::int64_t budget = 1 << 22;  // doubles
    std::int64_t cols = std::max<std::int64_t>(std::int64_t{1}, budget / std::max<std::int64_t>(d.k, 1));
    cols = std::min<std::int64_t>(cols, d.p);
    cols = std::min<std::int64_t>(cols, 16384);
    return static_cast<int>(cols);
}

/// Gathers patch columns [p0, p1) of item n into `patches` (k rows, p1-p0
/// cols). Out-of-range taps contribute zeros.
inline void im2col_tile(const double* x, const ConvDims& d, int n, std::int64_t p0,
                        std::int64_t p1, double* patches) {
    const std::int64_t cols = p1 - p0;
    const std::int64_t hw = static_cast<std::int64_t>(d.h) * d.w;
    const double* xn = x + static_cast<std::size_t>(n) * d.c * d.t * hw;
    std::int64_t row = 0;
    for (int c = 0; c < d.c; ++c) {
        const double* xc = xn + static_cast<std::size_t>(c) * d.t * hw;
        for (int dt = 0; dt < d.kt; ++dt)
            for (int dh = 0; dh < d.kh; ++dh)
                for (int dw = 0; dw < d.kw; ++dw, ++row) {
                    double* prow = patches + static_cast<std::size_t>(row) * cols;
                    for (std::int64_t p = p0; p < p1; ++p) {
                        const int wo = static_cast<int>(p % d.wo);
                        const int ho = static_cast<int>((p / d.wo) % d.ho);
                        const int to = static_cast<int>(p / (static_cast<std::int64_t>(d.wo) * d.ho));
                        const int ti = to * d.stride - d.pad + dt;
                        const int hi = ho * d.stride - d.pad + dh;
                        const int wi = wo * d.stride - d.pad + dw;
                        double v = 0.0;
                        if (ti >= 0 && ti < d.t && hi >= 0 && hi < d.h && wi >= 0 && wi < d.w)
                            v = xc[static_cast<std::size_t>(ti) * hw + static_cast<std::size_t>(hi) * d.w + wi];
                        prow[p - p0] = v;
                    }
                }
    }
}

/// Scatters patch-column gradients back into the input gradient.
inline void col2im_tile(double* gx, const ConvDims& d, int n, std::int64_t p0, std::int64_t p1,
                        const double* gpatches) {
    const std::int64_t cols = p1 - p0;
    const std::int64_t hw = static_cast<std::int64_t>(d.h) * d.w;
    double* gn = gx + static_cast<std::size_t>(n) * d.c * d.t * hw;
    std::int64_t row = 0;
    for (int c = 0; c < d.c; ++c) {
        double* gc = gn + static_cast<std::size_t>(c) * d.t * hw;
        for (int dt = 0; dt < d.kt; ++dt)
            for (int dh = 0; dh < d.kh; ++dh)
                for (int dw = 0; dw < d.kw; ++dw, ++row) {
                    const double* prow = gpatches + static_cast<std::size_t>(row) * cols;
                    for (std::int64_t p = p0; p < p1; ++p) {
                        const int wo = static_cast<int>(p % d.wo);
                        const int ho = static_cast<int>((p / d.wo) % d.ho);
                        const int to = static_cast<int>(p / (static_cast<std::int64_t>(d.wo) * d.ho));
                        const int ti = to * d.stride - d.pad + dt;
                        const int hi = ho * d.stride - d.pad + dh;
                        const int wi = wo * d.stride - d.pad + dw;
                        if (ti >= 0 && ti < d.t && hi >= 0 && hi < d.h && wi >= 0 && wi < d.w)
                            gc[static_cast<std::size_t>(ti) * hw + static_cast<std::size_t>(hi) * d.w + wi] +=
                                prow[p - p0];
                    }
                }
    }
}

}  // namespace detail

/// 3D convolution over (N, C, T, H, W) with an (F, C, kt, kh, kw) kernel and
/// per-filter bias (F). Zero padding, identical stride on all three axes.
/// Implemented as tiled im2col plus GEMM; the backward pass rebuilds the
/// patch tiles instead of caching them.
inline Var conv3d(Graph& g, Var x, Var weight, Var bias, int stride = 1, int pad = 0) {
    const Tensor& xv = g.value(x);
    const Tensor& wv = g.value(weight);
    const Tensor& bv = g.value(bias);
    const detail::ConvDims d = detail::conv_dims(xv.shape(), wv.shape(), stride, pad);
    check_arg(bv.rank() == 1 && bv.dim(0) == d.f, "conv3d bias must have one entry per filter");

    Tensor out({d.n, d.f, d.to, d.ho, d.wo});
    const int tile = detail::conv_tile_cols(d);
    std::vector<double> patches(static_cast<std::size_t>(d.k) * tile);
    std::vector<double> otile(static_cast<std::size_t>(d.f) * tile);
    for (int n = 0; n < d.n; ++n) {
        double* on = out.data() + static_cast<std::size_t>(n) * d.f * d.p;
        for (std::int64_t p0 = 0; p0 < d.p; p0 += tile) {
            const std::int64_t p1 = std::min<std::int64_t>(p0 + tile, d.p);
            const std::int64_t cols = p1 - p0;
            detail::im2col_tile(xv.data(), d, n, p0, p1, patches.data());
            for (int f = 0; f < d.f; ++f)
                std::fill(otile.begin() + static_cast<std::size_t>(f) * cols,
                          otile.begin() + static_cast<std::size_t>(f + 1) * cols, bv[f]);
            detail::gemm_ab(d.f, static_cast<int>(cols), static_cast<int>(d.k), wv.data(),
                            patches.data(), otile.data());
            for (int f = 0; f < d.f; ++f)
                std::memcpy(on + static_cast<std::size_t>(f) * d.p + p0,
                            otile.data() + static_cast<std::size_t>(f) * cols,
                            static_cast<std::size_t>(cols) * sizeof(double));
        }
    }

    return g.make_node(std::move(out), {x, weight, bias},
                       [x, weight, bias, d](Graph& g2, const Tensor& go) {
                           const Tensor& xv2 = g2.value(x);
                           const Tensor& wv2 = g2.value(weight);
                           const bool need_x = g2.wants_grad(x);
                           const bool need_w = g2.wants_grad(weight);
                           const bool need_b = g2.wants_grad(bias);
                           if (need_b) {
                               Tensor& gb = g2.grad_buf(bias);
                               for (int n = 0; n < d.n; ++n)
                                   for (int f = 0; f < d.f; ++f) {
                                       const double* row = go.data() +
                                           (static_cast<std::size_t>(n) * d.f + f) * d.p;
                                       double s = 0.0;
                                       for (std::int64_t p = 0; p < d.p; ++p) s += row[p];
                                       gb[f] += s;
                                   }
                           }
                           if (!need_x && !need_w) return;
                           const int tile = detail::conv_tile_cols(d);
                           std::vector<double> patches(static_cast<std::size_t>(d.k) * tile);
                           std::vector<double> gtile(static_cast<std::size_t>(d.f) * tile);
                           std::vector<double> gpatches;
                           if (need_x) gpatches.resize(static_cast<std::size_t>(d.k) * tile);
                           Tensor* gx = need_x ? &g2.grad_buf(x) : nullptr;
                           Tensor* gw = need_w ? &g2.grad_buf(weight) : nullptr;
                           for (int n = 0; n < d.n; ++n) {
                               const double* gon = go.data() + static_cast<std::size_t>(n) * d.f * d.p;
                               for (std::int64_t p0 = 0; p0 < d.p; p0 += tile) {
                                   const std::int64_t p1 = std::min<std::int64_t>(p0 + tile, d.p);
                                   const std::int64_t cols = p1 - p0;
                                   for (int f = 0; f < d.f; ++f)
                                       std::memcpy(gtile.data() + static_cast<std::size_t>(f) * cols,
                                                   gon + static_cast<std::size_t>(f) * d.p + p0,
                                                   static_cast<std::size_t>(cols) * sizeof(double));
                                   if (need_w) {
                                       detail::im2col_tile(xv2.data(), d, n, p0, p1, patches.data());
                                       detail::gemm_abt(d.f, static_cast<int>(d.k),
                                                        static_cast<int>(cols), gtile.data(),
                                                        patches.data(), gw->data());
                                   }
                                   if (need_x) {
                                       std::fill(gpatches.begin(),
                                                 gpatches.begin() + static_cast<std::size_t>(d.k) * cols,
                                                 0.0);
                                       detail::gemm_atb(d.f, static_cast<int>(d.k),
                                                        static_cast<int>(cols), wv2.data(),
                                                        gtile.data(), gpatches.data());
                                       detail::col2im_tile(gx->data(), d, n, p0, p1,
                                                           gpatches.data());
                                   }
                               }
                           }
                       });
}

/// Max pooling over (N, C, T, H, W) with non-overlapping windows of extent
/// (wt, wh, ww). Trailing partial windows are pooled over their valid
/// elements (ceil-division output extents). Gradient flows to the first
/// maximal element of each window in scan order.
inline Var maxpool3d(Graph& g, Var x, int wt, int wh, int ww) {
    const Tensor& xv = g.value(x);
    check_arg(xv.rank() == 5, "maxpool3d input must be (N,C,T,H,W)");
    check_arg(wt >= 1 && wh >= 1 && ww >= 1, "maxpool3d window extents must be >= 1");
    const int n = xv.dim(0), c = xv.dim(1), t = xv.dim(2), h = xv.dim(3), w = xv.dim(4);
    const int to = (t + wt - 1) / wt, ho = (h + wh - 1) / wh, wo = (w + ww - 1) / ww;
    Tensor out({n, c, to, ho, wo});
    auto argmax = std::make_shared<std::vector<std::int64_t>>(
        static_cast<std::size_t>(out.size()));
    const std::int64_t hw = static_cast<std::int64_t>(h) * w;
    std::int64_t oi = 0;
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci) {
            const double* xc = xv.data() + (static_cast<std::size_t>(ni) * c + ci) * t * hw;
            const std::int64_t base = (static_cast<std::int64_t>(ni) * c + ci) * t * hw;
            for (int ot = 0; ot < to; ++ot)
                for (int oh = 0; oh < ho; ++oh)
                    for (int ow = 0; ow < wo; ++ow, ++oi) {
                        const int t1 = std::min(t, (ot + 1) * wt);
                        const int h1 = std::min(h, (oh + 1) * wh);
                        const int w1 = std::min(w, (ow + 1) * ww);
                        double best = 0.0;
                        std::int64_t best_idx = -1;
                        for (int ti = ot * wt; ti < t1; ++ti)
                            for (int hi = oh * wh; hi < h1; ++hi)
                                for (int wi = ow * ww; wi < w1; ++wi) {
                                    const std::int64_t idx = ti * hw + static_cast<std::int64_t>(hi) * w + wi;
                                    const double v = xc[idx];
                                    if (best_idx < 0 || v > best) {
                                        best = v;
                                        best_idx = idx;
                                    }
                                }
                        out[oi] = best;
                        (*argmax)[static_cast<std::size_t>(oi)] = base + best_idx;
                    }
        }
    return g.make_node(std::move(out), {x}, [x, argmax](Graph& g2, const Tensor& go) {
        if (!g2.wants_grad(x)) return;
        Tensor& gx = g2.grad_buf(x);
        for (std::int64_t i = 0; i < go.size(); ++i)
            gx[(*argmax)[static_cast<std::size_t>(i)]] += go[i];
    });
}

/// Fully connected layer: x (N, K) * weight (K, M) + bias (M).
inline Var dense(Graph& g, Var x, Var weight, Var bias) {
    const Tensor& xv = g.value(x);
    const Tensor& wv = g.value(weight);
    const Tensor& bv = g.value(bias);
    check_arg(xv.rank() == 2, "dense input must be (N,K)");
    check_arg(wv.rank() == 2 && wv.dim(0) == xv.dim(1), "dense weight must be (K,M)");
    check_arg(bv.rank() == 1 && bv.dim(0) == wv.dim(1), "dense bias must be (M)");
    const int n = xv.dim(0), k = xv.dim(1), m = wv.dim(1);
    Tensor out({n, m});
    for (int i = 0; i < n; ++i)
        std::memcpy(out.data() + static_cast<std::size_t>(i) * m, bv.data(),
                    static_cast<std::size_t>(m) * sizeof(double));
    detail::gemm_ab(n, m, k, xv.data(), wv.data(), out.data());
    return g.make_node(std::move(out), {x, weight, bias},
                       [x, weight, bias, n, k, m](Graph& g2, const Tensor& go) {
                           if (g2.wants_grad(bias)) {
                               Tensor& gb = g2.grad_buf(bias);
                               for (int i = 0; i < n; ++i)
                                   for (int j = 0; j < m; ++j)
                                       gb[j] += go[static_cast<std::int64_t>(i) * m + j];
                           }
                           if (g2.wants_grad(weight))
                               detail::gemm_atb(n, k, m, g2.value(x).data(), go.data(),
                                                g2.grad_buf(weight).data());
                           if (g2.wants_grad(x))
                               detail::gemm_abt(n, k, m, go.data(), g2.value(weight).data(),
                                                g2.grad_buf(x).data());
                       });
}

}  // namespace ck
