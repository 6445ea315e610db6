#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cinekit/sequences.hpp"

namespace ck {
namespace detail {

/// Unnormalized in-place DFT of length n (sign = -1 forward, +1 inverse).
/// Radix-2 iterative when n is a power of two, direct evaluation otherwise.
inline void dft_1d(std::complex<double>* x, int n, int sign,
                   std::vector<std::complex<double>>& scratch) {
    if (n == 1) return;
    if ((n & (n - 1)) == 0) {
        // Bit-reversal permutation, then butterflies.
        for (int i = 1, j = 0; i < n; ++i) {
            int bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(x[i], x[j]);
        }
        for (int len = 2; len <= n; len <<= 1) {
            const double ang = sign * 2.0 * std::numbers::pi / len;
            const std::complex<double> wl(std::cos(ang), std::sin(ang));
            for (int i = 0; i < n; i += len) {
                std::complex<double> w(1.0, 0.0);
                for (int k = 0; k < len / 2; ++k) {
                    const std::complex<double> u = x[i + k];
                    const std::complex<double> v = x[i + k + len / 2] * w;
                    x[i + k] = u + v;
                    x[i + k + len / 2] = u - v;
                    w *= wl;
                }
            }
        }
        return;
    }
    scratch.assign(static_cast<std::size_t>(n), {0.0, 0.0});
    for (int k = 0; k < n; ++k) {
        std::complex<double> s(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(
                                   static_cast<std::int64_t>(k) * j % n) / n;
            s += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        scratch[static_cast<std::size_t>(k)] = s;
    }
    for (int k = 0; k < n; ++k) x[k] = scratch[static_cast<std::size_t>(k)];
}

/// Swaps half-planes in both axes. For even extents this operation is its
/// own inverse, so the same shift centers and un-centers.
inline void half_shift_2d(std::complex<double>* f, int h, int w) {
    const int hh = h / 2, hw = w / 2;
    for (int y = 0; y < hh; ++y) {
        std::complex<double>* top = f + static_cast<std::size_t>(y) * w;
        std::complex<double>* bot = f + static_cast<std::size_t>(y + hh) * w;
        for (int x = 0; x < w; ++x) {
            const int xs = (x + hw) % w;
            std::swap(top[x], bot[xs]);
        }
    }
}

}  // namespace detail

inline void require_even_frame(int h, int w, const char* op) {
    check_arg(h >= 2 && w >= 2 && h % 2 == 0 && w % 2 == 0,
              std::string(op) + ": frame extents must be even and >= 2");
}

/// Centered index of the conjugate-symmetric partner of index i (even n).
/// DC (n/2) and the Nyquist index (0) are their own partners.
inline int mirror_index(int i, int n) {
    check_arg(n >= 2 && n % 2 == 0, "mirror_index: extent must be even");
    check_arg(i >= 0 && i < n, "mirror_index: index out of range");
    const int u = (i + n / 2) % n;
    return ((n - u) % n + n / 2) % n;
}

/// In-place centered orthonormal 2D DFT of one frame:
///   X = shift(FFT2(shift(x))) / sqrt(H*W), inverse with the conjugate
/// kernel and the same 1/sqrt(H*W) factor. Even extents only.
inline void fft2_centered(std::complex<double>* frame, int h, int w, bool inverse) {
    require_even_frame(h, w, "fft2_centered");
    const int sign = inverse ? +1 : -1;
    std::vector<std::complex<double>> scratch;
    detail::half_shift_2d(frame, h, w);
    for (int y = 0; y < h; ++y)
        detail::dft_1d(frame + static_cast<std::size_t>(y) * w, w, sign, scratch);
    std::vector<std::complex<double>> col(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) col[static_cast<std::size_t>(y)] = frame[static_cast<std::size_t>(y) * w + x];
        detail::dft_1d(col.data(), h, sign, scratch);
        for (int y = 0; y < h; ++y) frame[static_cast<std::size_t>(y) * w + x] = col[static_cast<std::size_t>(y)];
    }
    detail::half_shift_2d(frame, h, w);
    const double norm = 1.0 / std::sqrt(static_cast<double>(h) * w);
    const std::int64_t n = static_cast<std::int64_t>(h) * w;
    for (std::int64_t i = 0; i < n; ++i) frame[i] *= norm;
}

/// Frame-by-frame centered orthonormal 2D DFT of an image sequence.
inline KSpaceSequence to_kspace(const CineSequence& img) {
    require_even_frame(img.h, img.w, "to_kspace");
    KSpaceSequence ks(img.t, img.h, img.w);
    const std::int64_t fs = img.frame_size();
    for (int ti = 0; ti < img.t; ++ti) {
        std::complex<double>* f = ks.frame(ti);
        const double* src = img.frame(ti);
        for (std::int64_t i = 0; i < fs; ++i) f[i] = {src[i], 0.0};
        fft2_centered(f, img.h, img.w, false);
    }
    return ks;
}

/// Inverse transform back to image space; the imaginary part (transform
/// noise, or asymmetry introduced by corruption) is discarded.
inline CineSequence from_kspace(const KSpaceSequence& ks) {
    require_even_frame(ks.h, ks.w, "from_kspace");
    CineSequence img(ks.t, ks.h, ks.w);
    const std::int64_t fs = ks.frame_size();
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(fs));
    for (int ti = 0; ti < ks.t; ++ti) {
        const std::complex<double>* src = ks.frame(ti);
        std::copy(src, src + fs, buf.begin());
        fft2_centered(buf.data(), ks.h, ks.w, true);
        double* dst = img.frame(ti);
        for (std::int64_t i = 0; i < fs; ++i) dst[i] = buf[static_cast<std::size_t>(i)].real();
    }
    return img;
}

}  // namespace ck
