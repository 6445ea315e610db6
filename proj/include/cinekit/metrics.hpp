#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cinekit/sequences.hpp"

namespace ck {

inline double rmse(const CineSequence& a, const CineSequence& b) {
    check_arg(a.t == b.t && a.h == b.h && a.w == b.w, "rmse: sequence extents differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.data.size()));
}

/// Peak signal-to-noise ratio in dB for the given intensity range.
/// Identical sequences yield +infinity; callers aggregating PSNR must
/// handle that sentinel (see AggregateMetrics).
inline double psnr(const CineSequence& a, const CineSequence& b, double range = 1.0) {
    check_arg(range > 0.0, "psnr range must be positive");
    const double e = rmse(a, b);
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(range / e);
}

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double range = 1.0;
};

/// Mean SSIM over all fully valid (un-padded) Gaussian windows of every
/// frame. Frames must be at least as large as the window.
inline double ssim(const CineSequence& a, const CineSequence& b, const SsimParams& p = {}) {
    check_arg(a.t == b.t && a.h == b.h && a.w == b.w, "ssim: sequence extents differ");
    check_arg(p.window >= 3 && p.window % 2 == 1, "ssim window must be odd and >= 3");
    check_arg(a.h >= p.window && a.w >= p.window, "ssim: frame smaller than the window");
    check_arg(p.sigma > 0.0 && p.range > 0.0, "ssim: sigma and range must be positive");

    const int half = p.window / 2;
    std::vector<double> g(static_cast<std::size_t>(p.window) * p.window);
    double gsum = 0.0;
    for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) {
            const double v = std::exp(-0.5 * (dy * dy + dx * dx) / (p.sigma * p.sigma));
            g[static_cast<std::size_t>(dy + half) * p.window + (dx + half)] = v;
            gsum += v;
        }
    for (auto& v : g) v /= gsum;

    const double c1 = (p.k1 * p.range) * (p.k1 * p.range);
    const double c2 = (p.k2 * p.range) * (p.k2 * p.range);

    double total = 0.0;
    std::int64_t count = 0;
    for (int t = 0; t < a.t; ++t)
        for (int y = half; y < a.h - half; ++y)
            for (int x = half; x < a.w - half; ++x) {
                double mu_a = 0.0, mu_b = 0.0;
                for (int dy = -half; dy <= half; ++dy)
                    for (int dx = -half; dx <= half; ++dx) {
                        const double wgt =
                            g[static_cast<std::size_t>(dy + half) * p.window + (dx + half)];
                        mu_a += wgt * a.at(t, y + dy, x + dx);
                        mu_b += wgt * b.at(t, y + dy, x + dx);
                    }
                double va = 0.0, vb = 0.0, vab = 0.0;
                for (int dy = -half; dy <= half; ++dy)
                    for (int dx = -half; dx <= half; ++dx) {
                        const double wgt =
                            g[static_cast<std::size_t>(dy + half) * p.window + (dx + half)];
                        const double da = a.at(t, y + dy, x + dx) - mu_a;
                        const double db = b.at(t, y + dy, x + dx) - mu_b;
                        va += wgt * da * da;
                        vb += wgt * db * db;
                        vab += wgt * da * db;
                    }
                const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * vab + c2);
                const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2);
                total += num / den;
                ++count;
            }
    return total / static_cast<double>(count);
}

/// Area under the ROC curve via the rank statistic; tied scores contribute
/// half credit. Labels are 1 for the positive class. Throws when only one
/// class is present.
inline double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_arg(scores.size() == labels.size(), "auroc: score/label count mismatch");
    check_arg(!scores.empty(), "auroc: empty input");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });

    std::int64_t n_pos = 0, n_neg = 0;
    for (int l : labels) {
        check_arg(l == 0 || l == 1, "auroc labels must be 0 or 1");
        l ? ++n_pos : ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw DegenerateInputError("auroc needs both classes present");

    // Average ranks across tie groups (1-based ranks).
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]]) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Running mean of per-sequence metrics. PSNR entries of +infinity (exact
/// reconstructions) are excluded from the mean and counted separately; the
/// reported PSNR is infinite only if every entry was infinite.
struct AggregateMetrics {
    double psnr_sum = 0.0;
    double rmse_sum = 0.0;
    double ssim_sum = 0.0;
    int n = 0;
    int psnr_finite_n = 0;
    int psnr_inf_n = 0;

    void add(double psnr_v, double rmse_v, double ssim_v) {
        if (std::isinf(psnr_v)) {
            ++psnr_inf_n;
        } else {
            psnr_sum += psnr_v;
            ++psnr_finite_n;
        }
        rmse_sum += rmse_v;
        ssim_sum += ssim_v;
        ++n;
    }

    double mean_psnr() const {
        if (n == 0) return std::numeric_limits<double>::quiet_NaN();
        if (psnr_finite_n == 0) return std::numeric_limits<double>::infinity();
        return psnr_sum / psnr_finite_n;
    }
    double mean_rmse() const {
        return n ? rmse_sum / n : std::numeric_limits<double>::quiet_NaN();
    }
    double mean_ssim() const {
        return n ? ssim_sum / n : std::numeric_limits<double>::quiet_NaN();
    }
};

}  // namespace ck
