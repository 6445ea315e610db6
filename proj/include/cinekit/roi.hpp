#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include "cinekit/sequences.hpp"

namespace ck {

/// Min-max normalization over the whole sequence to [0, 1].
inline CineSequence normalize_intensity(const CineSequence& seq) {
    check_arg(seq.size() > 0, "cannot normalize an empty sequence");
    const auto [lo_it, hi_it] = std::minmax_element(seq.data.begin(), seq.data.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi - lo <= 0.0)
        throw DegenerateInputError("sequence has constant intensity; cannot normalize");
    CineSequence out(seq.t, seq.h, seq.w);
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < seq.data.size(); ++i) out.data[i] = (seq.data[i] - lo) * inv;
    return out;
}

/// Per-pixel magnitude of the k-th temporal Fourier coefficient. Pixels that
/// pulse once per cycle (k = 1) light up; static anatomy cancels out.
inline std::vector<double> temporal_harmonic_map(const CineSequence& seq, int k = 1) {
    check_arg(k >= 1 && k < seq.t, "harmonic index must be in [1, t_frames)");
    std::vector<double> map(static_cast<std::size_t>(seq.h) * seq.w, 0.0);
    std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(seq.t));
    for (int t = 0; t < seq.t; ++t) {
        const double ang = -2.0 * std::numbers::pi * k * t / static_cast<double>(seq.t);
        twiddle[static_cast<std::size_t>(t)] = {std::cos(ang), std::sin(ang)};
    }
    for (int y = 0; y < seq.h; ++y)
        for (int x = 0; x < seq.w; ++x) {
            std::complex<double> acc(0.0, 0.0);
            for (int t = 0; t < seq.t; ++t)
                acc += seq.at(t, y, x) * twiddle[static_cast<std::size_t>(t)];
            map[static_cast<std::size_t>(y) * seq.w + x] = std::abs(acc);
        }
    return map;
}

struct CircleEstimate {
    int cy = 0;
    int cx = 0;
    int r = 0;
    std::int64_t votes = 0;
};

namespace detail {

/// Integer lattice points of a circle of radius r (midpoint algorithm,
/// deduplicated).
inline std::vector<std::pair<int, int>> circle_offsets(int r) {
    std::set<std::pair<int, int>> pts;
    int x = r, y = 0, err = 1 - r;
    while (x >= y) {
        for (const auto [a, b] : {std::pair{x, y}, std::pair{y, x}}) {
            pts.insert({a, b});
            pts.insert({a, -b});
            pts.insert({-a, b});
            pts.insert({-a, -b});
        }
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
    return {pts.begin(), pts.end()};
}

}  // namespace detail

/// Circular Hough transform over the harmonic map. Pixels above the
/// `edge_percentile` nearest-rank threshold vote for all centers at radius
/// r_min..r_max; the best (votes, then smaller radius, then row-major
/// center) wins. A flat map or an empty edge set is a degenerate input.
inline CircleEstimate hough_circle_center(const std::vector<double>& map, int h, int w,
                                          int r_min, int r_max,
                                          double edge_percentile = 0.90) {
    check_arg(static_cast<std::int64_t>(map.size()) == static_cast<std::int64_t>(h) * w,
              "map size does not match extents");
    check_arg(r_min >= 1 && r_min <= r_max, "invalid radius range");
    check_arg(edge_percentile > 0.0 && edge_percentile < 1.0, "percentile must be in (0,1)");

    double maxabs = 0.0;
    for (double v : map) maxabs = std::max(maxabs, std::abs(v));
    if (maxabs < 1e-9)
        throw DegenerateInputError("harmonic map is flat; no cardiac motion to localize");

    std::vector<double> sorted = map;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t rank =
        static_cast<std::size_t>(edge_percentile * static_cast<double>(sorted.size() - 1));
    const double threshold = sorted[rank];

    std::vector<std::pair<int, int>> edges;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (map[static_cast<std::size_t>(y) * w + x] > threshold) edges.push_back({y, x});
    if (edges.empty())
        throw DegenerateInputError("no edge pixels above the harmonic threshold");

    CircleEstimate best;
    best.votes = -1;
    std::vector<std::int64_t> acc(static_cast<std::size_t>(h) * w);
    for (int r = r_min; r <= r_max; ++r) {
        std::fill(acc.begin(), acc.end(), 0);
        const auto offsets = detail::circle_offsets(r);
        for (const auto& [ey, ex] : edges)
            for (const auto& [dy, dx] : offsets) {
                const int cy = ey + dy, cx = ex + dx;
                if (cy >= 0 && cy < h && cx >= 0 && cx < w)
                    ++acc[static_cast<std::size_t>(cy) * w + cx];
            }
        for (int cy = 0; cy < h; ++cy)
            for (int cx = 0; cx < w; ++cx) {
                const std::int64_t v = acc[static_cast<std::size_t>(cy) * w + cx];
                if (v > best.votes) best = {cy, cx, r, v};
            }
    }
    return best;
}

/// Crops a size x size window centered at (cy, cx), shifted as needed to
/// stay in bounds. `size` must be even and fit in the frame.
inline CineSequence crop_roi(const CineSequence& seq, int cy, int cx, int size) {
    check_arg(size >= 2 && size % 2 == 0, "crop size must be even and >= 2");
    check_arg(size <= seq.h && size <= seq.w, "crop size exceeds the frame");
    const int y0 = std::clamp(cy - size / 2, 0, seq.h - size);
    const int x0 = std::clamp(cx - size / 2, 0, seq.w - size);
    CineSequence out(seq.t, size, size);
    for (int t = 0; t < seq.t; ++t)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) out.at(t, y, x) = seq.at(t, y0 + y, x0 + x);
    return out;
}

/// Full localization chain: normalize, harmonic map, Hough, crop.
inline CineSequence extract_roi(const CineSequence& seq, int out_size, int harmonic_k = 1) {
    const CineSequence norm = normalize_intensity(seq);
    const std::vector<double> map = temporal_harmonic_map(norm, harmonic_k);
    const int r_max = std::max(2, std::min(seq.h, seq.w) / 2 - 1);
    const CircleEstimate c = hough_circle_center(map, seq.h, seq.w, 2, r_max);
    return crop_roi(norm, c.cy, c.cx, out_size);
}

}  // namespace ck
