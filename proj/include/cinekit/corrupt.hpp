#pragma once

#include <algorithm>
#include <vector>

#include "cinekit/fourier.hpp"
#include "cinekit/sequences.hpp"

namespace ck {

/// One replaced phase-encoding line: row `ky` of the owning frame is
/// overwritten with row `ky` taken from clean frame `source_frame`.
struct LineSwap {
    int ky = 0;
    int source_frame = 0;
};

/// Full description of a corruption episode. frames[t] lists the swaps
/// applied to frame t; ky values within one frame are distinct.
struct CorruptionPlan {
    int t_frames = 0;
    int height = 0;
    std::vector<std::vector<LineSwap>> frames;

    int total_swaps() const {
        int n = 0;
        for (const auto& f : frames) n += static_cast<int>(f.size());
        return n;
    }

    void validate() const {
        check_arg(t_frames >= 1 && height >= 1, "plan extents must be positive");
        check_arg(static_cast<int>(frames.size()) == t_frames,
                  "plan must describe every frame");
        std::vector<char> seen(static_cast<std::size_t>(height));
        for (int t = 0; t < t_frames; ++t) {
            std::fill(seen.begin(), seen.end(), 0);
            for (const LineSwap& s : frames[static_cast<std::size_t>(t)]) {
                check_arg(s.ky >= 0 && s.ky < height, "swap line index out of range");
                check_arg(s.source_frame >= 0 && s.source_frame < t_frames,
                          "swap source frame out of range");
                check_arg(s.source_frame != t, "swap source must be a different frame");
                check_arg(!seen[static_cast<std::size_t>(s.ky)],
                          "swap line indices must be distinct within a frame");
                seen[static_cast<std::size_t>(s.ky)] = 1;
            }
        }
    }
};

/// Draws a plan with `n_lines` distinct corrupted lines per affected frame.
/// Line sets use a partial Fisher-Yates shuffle; source frames are uniform
/// over the other frames. `frames_affected` < 0 corrupts every frame,
/// otherwise that many frames are chosen uniformly without replacement.
inline CorruptionPlan sample_plan(int t_frames, int height, int n_lines, Rng& rng,
                                  int frames_affected = -1) {
    check_arg(t_frames >= 1 && height >= 1, "plan extents must be positive");
    check_arg(n_lines >= 0 && n_lines <= height, "lines per frame must be in [0, height]");
    check_arg(t_frames >= 2 || n_lines == 0,
              "corrupting lines requires at least two frames");
    check_arg(frames_affected <= t_frames, "cannot affect more frames than exist");

    std::vector<char> affected(static_cast<std::size_t>(t_frames), 1);
    if (frames_affected >= 0) {
        std::fill(affected.begin(), affected.end(), 0);
        std::vector<int> order(static_cast<std::size_t>(t_frames));
        for (int i = 0; i < t_frames; ++i) order[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < frames_affected; ++i) {
            const int j = static_cast<int>(rng.uniform_int(i, t_frames - 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
            affected[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
        }
    }

    CorruptionPlan plan;
    plan.t_frames = t_frames;
    plan.height = height;
    plan.frames.resize(static_cast<std::size_t>(t_frames));
    std::vector<int> lines(static_cast<std::size_t>(height));
    for (int t = 0; t < t_frames; ++t) {
        if (!affected[static_cast<std::size_t>(t)] || n_lines == 0) continue;
        for (int i = 0; i < height; ++i) lines[static_cast<std::size_t>(i)] = i;
        auto& swaps = plan.frames[static_cast<std::size_t>(t)];
        swaps.reserve(static_cast<std::size_t>(n_lines));
        for (int i = 0; i < n_lines; ++i) {
            const int j = static_cast<int>(rng.uniform_int(i, height - 1));
            std::swap(lines[static_cast<std::size_t>(i)], lines[static_cast<std::size_t>(j)]);
            // Uniform over the t_frames - 1 other frames.
            int src = static_cast<int>(rng.uniform_int(0, t_frames - 2));
            if (src >= t) ++src;
            swaps.push_back({lines[static_cast<std::size_t>(i)], src});
        }
    }
    plan.validate();
    return plan;
}

struct CorruptionResult {
    KSpaceSequence kspace;   // corrupted measurements
    CineSequence baseline;   // zero-correction reconstruction of them
    LineMask mask;           // ground truth; 0 where a line was replaced
};

/// Applies a plan to a clean sequence. Replaced lines are verbatim copies of
/// the clean source frame's k-space line; the mask marks them as corrupted.
inline CorruptionResult corrupt_sequence(const CineSequence& clean, const CorruptionPlan& plan) {
    plan.validate();
    check_arg(clean.t == plan.t_frames && clean.h == plan.height,
              "plan does not match sequence extents");
    const KSpaceSequence clean_ks = to_kspace(clean);
    CorruptionResult out;
    out.kspace = clean_ks;
    out.mask = LineMask(clean.t, clean.h, 1);
    for (int t = 0; t < plan.t_frames; ++t)
        for (const LineSwap& s : plan.frames[static_cast<std::size_t>(t)]) {
            auto dst = line_view(out.kspace, t, s.ky);
            auto src = line_view(clean_ks, s.source_frame, s.ky);
            std::copy(src.begin(), src.end(), dst.begin());
            out.mask.at(t, s.ky) = 0;
        }
    out.baseline = from_kspace(out.kspace);
    return out;
}

}  // namespace ck
