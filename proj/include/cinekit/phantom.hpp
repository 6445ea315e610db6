#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cinekit/common.hpp"
#include "cinekit/sequences.hpp"

namespace ck {

/// Geometry and intensity description of one synthetic short-axis subject:
/// a static body ellipse containing a contracting myocardial annulus with a
/// blood pool inside. Lengths are in pixels of the target grid.
struct PhantomParams {
    int t_frames = 50;
    int grid_h = 64;
    int grid_w = 64;

    double center_y = 32.0;
    double center_x = 32.0;
    double epi_radius = 14.0;        // outer myocardial radius, static
    double endo_radius = 8.0;        // inner radius at the cycle midpoint
    double contraction_amp = 3.0;    // inner radius swings +- this amount
    double phase = 0.3;              // radians, offsets the cardiac cycle

    double intensity_background = 0.05;
    double intensity_body = 0.30;
    double intensity_myocardium = 0.55;
    double intensity_blood = 0.85;

    double texture_sigma = 1.5;      // blur of the static intensity texture
    double texture_amp = 0.04;
    std::uint64_t seed = 0;

    void validate() const {
        check_arg(t_frames >= 1, "phantom needs at least one frame");
        check_arg(grid_h >= 8 && grid_w >= 8, "phantom grid must be at least 8x8");
        check_arg(grid_h % 2 == 0 && grid_w % 2 == 0, "phantom grid extents must be even");
        check_arg(contraction_amp >= 0.0, "contraction amplitude must be >= 0");
        check_arg(endo_radius - contraction_amp > 0.0,
                  "inner radius must stay positive over the cycle");
        check_arg(endo_radius + contraction_amp < epi_radius,
                  "inner radius must stay inside the outer radius over the cycle");
        check_arg(epi_radius < 0.5 * std::min(grid_h, grid_w),
                  "outer radius must fit inside the grid");
        for (double v : {intensity_background, intensity_body, intensity_myocardium,
                         intensity_blood})
            check_arg(v >= 0.0 && v <= 1.0, "intensities must lie in [0, 1]");
        check_arg(texture_sigma > 0.0, "texture sigma must be positive");
        check_arg(texture_amp >= 0.0, "texture amplitude must be >= 0");
    }
};

/// Inner (endocardial) radius at frame t: one sine cycle spans t_frames.
inline double endo_radius_at(const PhantomParams& p, int t) {
    return p.endo_radius +
           p.contraction_amp *
               std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / p.t_frames + p.phase);
}

namespace detail {

/// Coverage of a disk of radius r at distance d from its center; ~1 px
/// linear edge so region boundaries stay sub-pixel sharp.
inline double disk_coverage(double d, double r) {
    return std::clamp(r - d + 0.5, 0.0, 1.0);
}

/// Static blurred white-noise texture, one frame-sized grid in [-1, 1].
inline std::vector<double> make_texture(int h, int w, double sigma, std::uint64_t seed) {
    std::vector<double> noise(static_cast<std::size_t>(h) * w);
    Rng rng = Rng::derive(seed, {0x7e});
    for (auto& v : noise) v = rng.normal();
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        ksum += kernel[static_cast<std::size_t>(i + radius)];
    }
    for (auto& k : kernel) k /= ksum;

    std::vector<double> tmp(noise.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = std::clamp(x + i, 0, w - 1);
                s += kernel[static_cast<std::size_t>(i + radius)] *
                     noise[static_cast<std::size_t>(y) * w + xx];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = s;
        }
    std::vector<double> out(noise.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = std::clamp(y + i, 0, h - 1);
                s += kernel[static_cast<std::size_t>(i + radius)] *
                     tmp[static_cast<std::size_t>(yy) * w + x];
            }
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    double maxabs = 1e-12;
    for (double v : out) maxabs = std::max(maxabs, std::abs(v));
    for (auto& v : out) v /= maxabs;
    return out;
}

}  // namespace detail

/// Renders the full sequence. The body ellipse and texture are static; only
/// the endocardial radius moves. All output values lie in [0, 1].
inline CineSequence generate_phantom(const PhantomParams& p) {
    p.validate();
    CineSequence seq(p.t_frames, p.grid_h, p.grid_w);
    const std::vector<double> texture =
        detail::make_texture(p.grid_h, p.grid_w, p.texture_sigma, p.seed);

    // Body ellipse semi-axes; fixed fractions of the grid keep the heart
    // well inside the body for every admissible parameter set.
    const double body_a = 0.46 * p.grid_w;
    const double body_b = 0.42 * p.grid_h;
    const double body_cy = 0.5 * p.grid_h;
    const double body_cx = 0.5 * p.grid_w;

    for (int t = 0; t < p.t_frames; ++t) {
        const double r_endo = endo_radius_at(p, t);
        double* f = seq.frame(t);
        for (int y = 0; y < p.grid_h; ++y)
            for (int x = 0; x < p.grid_w; ++x) {
                const double dy = y - p.center_y;
                const double dx = x - p.center_x;
                const double d = std::sqrt(dy * dy + dx * dx);

                // Body coverage via an elliptical pseudo-distance.
                const double ey = (y - body_cy) / body_b;
                const double ex = (x - body_cx) / body_a;
                const double de = (std::sqrt(ey * ey + ex * ex) - 1.0) *
                                  std::min(body_a, body_b);
                const double cov_body = std::clamp(-de + 0.5, 0.0, 1.0);

                const double cov_epi = detail::disk_coverage(d, p.epi_radius);
                const double cov_endo = detail::disk_coverage(d, r_endo);

                double v = p.intensity_background;
                v += (p.intensity_body - p.intensity_background) * cov_body;
                v += (p.intensity_myocardium - p.intensity_body) * cov_epi;
                v += (p.intensity_blood - p.intensity_myocardium) * cov_endo;
                v += p.texture_amp * texture[static_cast<std::size_t>(y) * p.grid_w + x];
                f[static_cast<std::size_t>(y) * p.grid_w + x] = std::clamp(v, 0.0, 1.0);
            }
    }
    return seq;
}

}  // namespace ck
