#pragma once

// Reference implementations used to cross-check the library. Everything here
// is written in the most literal form possible (nested loops, no tiling, no
// shared code with the implementations under test).

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cinekit/tensor.hpp"

namespace oracle {

/// Literal 3D convolution: walks every output element and every kernel tap.
inline ck::Tensor conv3d_loops(const ck::Tensor& x, const ck::Tensor& w, const ck::Tensor& b,
                               int stride, int pad) {
    const int n = x.dim(0), c = x.dim(1), t = x.dim(2), h = x.dim(3), wd = x.dim(4);
    const int f = w.dim(0), kt = w.dim(2), kh = w.dim(3), kw = w.dim(4);
    const int to = (t + 2 * pad - kt) / stride + 1;
    const int ho = (h + 2 * pad - kh) / stride + 1;
    const int wo = (wd + 2 * pad - kw) / stride + 1;
    ck::Tensor out({n, f, to, ho, wo});
    for (int ni = 0; ni < n; ++ni)
        for (int fi = 0; fi < f; ++fi)
            for (int ot = 0; ot < to; ++ot)
                for (int oh = 0; oh < ho; ++oh)
                    for (int ow = 0; ow < wo; ++ow) {
                        double acc = b.at({fi});
                        for (int ci = 0; ci < c; ++ci)
                            for (int dt = 0; dt < kt; ++dt)
                                for (int dh = 0; dh < kh; ++dh)
                                    for (int dw = 0; dw < kw; ++dw) {
                                        const int ti = ot * stride - pad + dt;
                                        const int hi = oh * stride - pad + dh;
                                        const int wi = ow * stride - pad + dw;
                                        if (ti < 0 || ti >= t || hi < 0 || hi >= h || wi < 0 ||
                                            wi >= wd)
                                            continue;
                                        acc += x.at({ni, ci, ti, hi, wi}) *
                                               w.at({fi, ci, dt, dh, dw});
                                    }
                        out.at({ni, fi, ot, oh, ow}) = acc;
                    }
    return out;
}

/// Literal max pooling with ceil-division output extents; partial trailing
/// windows pool over whatever elements exist.
inline ck::Tensor maxpool3d_loops(const ck::Tensor& x, int wt, int wh, int ww) {
    const int n = x.dim(0), c = x.dim(1), t = x.dim(2), h = x.dim(3), wd = x.dim(4);
    const int to = (t + wt - 1) / wt, ho = (h + wh - 1) / wh, wo = (wd + ww - 1) / ww;
    ck::Tensor out({n, c, to, ho, wo});
    for (int ni = 0; ni < n; ++ni)
        for (int ci = 0; ci < c; ++ci)
            for (int ot = 0; ot < to; ++ot)
                for (int oh = 0; oh < ho; ++oh)
                    for (int ow = 0; ow < wo; ++ow) {
                        double best = -std::numeric_limits<double>::infinity();
                        for (int ti = ot * wt; ti < std::min(t, (ot + 1) * wt); ++ti)
                            for (int hi = oh * wh; hi < std::min(h, (oh + 1) * wh); ++hi)
                                for (int wi = ow * ww; wi < std::min(wd, (ow + 1) * ww); ++wi)
                                    best = std::max(best, x.at({ni, ci, ti, hi, wi}));
                        out.at({ni, ci, ot, oh, ow}) = best;
                    }
    return out;
}

/// Triple-loop matrix product: (N,K) x (K,M) -> (N,M).
inline ck::Tensor matmul_loops(const ck::Tensor& a, const ck::Tensor& b) {
    const int n = a.dim(0), k = a.dim(1), m = b.dim(1);
    ck::Tensor out({n, m});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int kk = 0; kk < k; ++kk) s += a.at({i, kk}) * b.at({kk, j});
            out.at({i, j}) = s;
        }
    return out;
}

/// Textbook Adam on a flat parameter vector, one update per call.
struct AdamLoops {
    double lr, beta1, beta2, eps;
    long t = 0;
    std::vector<double> m, v;

    AdamLoops(std::size_t n, double lr_, double b1, double b2, double eps_)
        : lr(lr_), beta1(b1), beta2(b2), eps(eps_), m(n, 0.0), v(n, 0.0) {}

    void update(std::vector<double>& p, const std::vector<double>& g) {
        t += 1;
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            const double mh = m[i] / (1.0 - std::pow(beta1, static_cast<double>(t)));
            const double vh = v[i] / (1.0 - std::pow(beta2, static_cast<double>(t)));
            p[i] -= lr * mh / (std::sqrt(vh) + eps);
        }
    }
};

/// Direct O(N^2) centered orthonormal 2D DFT of a single real frame:
///   X[ky][kx] = sum_{y,x} f[y][x] exp(-2i pi (fy(ky) y + fx(kx) x)) / sqrt(HW)
/// with centered frequencies fy(ky) = (ky - H/2)/H.
inline std::vector<std::complex<double>> dft2_centered_loops(const std::vector<double>& f, int h,
                                                             int w) {
    std::vector<std::complex<double>> out(static_cast<std::size_t>(h) * w);
    const double norm = 1.0 / std::sqrt(static_cast<double>(h) * w);
    for (int ky = 0; ky < h; ++ky)
        for (int kx = 0; kx < w; ++kx) {
            std::complex<double> s(0.0, 0.0);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double ph = -2.0 * M_PI *
                                      ((ky - h / 2) * (y - h / 2) / static_cast<double>(h) +
                                       (kx - w / 2) * (x - w / 2) / static_cast<double>(w));
                    s += f[static_cast<std::size_t>(y) * w + x] *
                         std::complex<double>(std::cos(ph), std::sin(ph));
                }
            out[static_cast<std::size_t>(ky) * w + kx] = s * norm;
        }
    return out;
}

}  // namespace oracle
