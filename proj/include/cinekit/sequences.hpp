#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "cinekit/common.hpp"

namespace ck {

/// Real-valued image sequence, (T, H, W) row-major.
struct CineSequence {
    int t = 0, h = 0, w = 0;
    std::vector<double> data;

    CineSequence() = default;
    CineSequence(int t_, int h_, int w_) : t(t_), h(h_), w(w_) {
        check_arg(t > 0 && h > 0 && w > 0, "sequence extents must be positive");
        data.assign(static_cast<std::size_t>(t) * h * w, 0.0);
    }

    std::int64_t frame_size() const { return static_cast<std::int64_t>(h) * w; }
    std::int64_t size() const { return static_cast<std::int64_t>(t) * h * w; }

    double& at(int ti, int y, int x) {
        return data[(static_cast<std::size_t>(ti) * h + y) * w + x];
    }
    double at(int ti, int y, int x) const {
        return data[(static_cast<std::size_t>(ti) * h + y) * w + x];
    }

    double* frame(int ti) { return data.data() + static_cast<std::size_t>(ti) * frame_size(); }
    const double* frame(int ti) const {
        return data.data() + static_cast<std::size_t>(ti) * frame_size();
    }
};

/// Complex k-space sequence, (T, H, W) row-major with centered frequency
/// layout: index H/2 (and W/2) is DC, index 0 is the Nyquist row.
struct KSpaceSequence {
    int t = 0, h = 0, w = 0;
    std::vector<std::complex<double>> data;

    KSpaceSequence() = default;
    KSpaceSequence(int t_, int h_, int w_) : t(t_), h(h_), w(w_) {
        check_arg(t > 0 && h > 0 && w > 0, "sequence extents must be positive");
        data.assign(static_cast<std::size_t>(t) * h * w, {0.0, 0.0});
    }

    std::int64_t frame_size() const { return static_cast<std::int64_t>(h) * w; }
    std::int64_t size() const { return static_cast<std::int64_t>(t) * h * w; }

    std::complex<double>& at(int ti, int ky, int kx) {
        return data[(static_cast<std::size_t>(ti) * h + ky) * w + kx];
    }
    std::complex<double> at(int ti, int ky, int kx) const {
        return data[(static_cast<std::size_t>(ti) * h + ky) * w + kx];
    }

    std::complex<double>* frame(int ti) {
        return data.data() + static_cast<std::size_t>(ti) * frame_size();
    }
    const std::complex<double>* frame(int ti) const {
        return data.data() + static_cast<std::size_t>(ti) * frame_size();
    }
};

/// Mutable view of one phase-encoding line (frame ti, row ky; W samples).
inline std::span<std::complex<double>> line_view(KSpaceSequence& ks, int ti, int ky) {
    check_arg(ti >= 0 && ti < ks.t, "line_view: frame index out of range");
    check_arg(ky >= 0 && ky < ks.h, "line_view: line index out of range");
    return {ks.frame(ti) + static_cast<std::size_t>(ky) * ks.w, static_cast<std::size_t>(ks.w)};
}

inline std::span<const std::complex<double>> line_view(const KSpaceSequence& ks, int ti, int ky) {
    check_arg(ti >= 0 && ti < ks.t, "line_view: frame index out of range");
    check_arg(ky >= 0 && ky < ks.h, "line_view: line index out of range");
    return {ks.frame(ti) + static_cast<std::size_t>(ky) * ks.w, static_cast<std::size_t>(ks.w)};
}

/// Per-line binary trust grid, (T, H): 1 = line treated as measured/clean,
/// 0 = line treated as corrupted.
struct LineMask {
    int t = 0, h = 0;
    std::vector<std::uint8_t> data;

    LineMask() = default;
    LineMask(int t_, int h_, std::uint8_t fill = 1) : t(t_), h(h_) {
        check_arg(t > 0 && h > 0, "mask extents must be positive");
        data.assign(static_cast<std::size_t>(t) * h, fill);
    }

    std::uint8_t& at(int ti, int ky) { return data[static_cast<std::size_t>(ti) * h + ky]; }
    std::uint8_t at(int ti, int ky) const { return data[static_cast<std::size_t>(ti) * h + ky]; }
    std::int64_t size() const { return static_cast<std::int64_t>(t) * h; }
};

/// Per-line probability grid, (T, H), values in [0, 1]; convention matches
/// LineMask (probability that the line is clean).
struct LineProb {
    int t = 0, h = 0;
    std::vector<double> data;

    LineProb() = default;
    LineProb(int t_, int h_, double fill = 1.0) : t(t_), h(h_) {
        check_arg(t > 0 && h > 0, "grid extents must be positive");
        data.assign(static_cast<std::size_t>(t) * h, fill);
    }

    double& at(int ti, int ky) { return data[static_cast<std::size_t>(ti) * h + ky]; }
    double at(int ti, int ky) const { return data[static_cast<std::size_t>(ti) * h + ky]; }
    std::int64_t size() const { return static_cast<std::int64_t>(t) * h; }
};

inline LineMask threshold_mask(const LineProb& pr, double tau) {
    LineMask m(pr.t, pr.h, 0);
    for (std::int64_t i = 0; i < pr.size(); ++i)
        m.data[static_cast<std::size_t>(i)] = pr.data[static_cast<std::size_t>(i)] >= tau ? 1 : 0;
    return m;
}

}  // namespace ck
