#include "cinekit/fourier.hpp"

#include <gtest/gtest.h>

#include "cinekit/gradcheck.hpp"
#include "oracles.hpp"

using ck::CineSequence;
using ck::KSpaceSequence;
using ck::Rng;

namespace {

CineSequence random_sequence(int t, int h, int w, std::uint64_t seed) {
    Rng rng(seed);
    CineSequence s(t, h, w);
    for (auto& v : s.data) v = rng.uniform(0.0, 1.0);
    return s;
}

double seq_rmse(const CineSequence& a, const CineSequence& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.data.size()));
}

double energy_image(const CineSequence& s) {
    double e = 0.0;
    for (double v : s.data) e += v * v;
    return e;
}

double energy_kspace(const KSpaceSequence& ks) {
    double e = 0.0;
    for (const auto& v : ks.data) e += std::norm(v);
    return e;
}

}  // namespace

TEST(Fourier, ConstantFrameConcentratesAtCenteredDc) {
    CineSequence img(1, 64, 64);
    for (auto& v : img.data) v = 1.0;
    KSpaceSequence ks = ck::to_kspace(img);
    // Orthonormal scaling puts sqrt(H*W) at DC for a unit constant.
    EXPECT_NEAR(ks.at(0, 32, 32).real(), 64.0, 1e-9);
    EXPECT_NEAR(ks.at(0, 32, 32).imag(), 0.0, 1e-9);
    for (int ky = 0; ky < 64; ++ky)
        for (int kx = 0; kx < 64; ++kx)
            if (ky != 32 || kx != 32) ASSERT_LT(std::abs(ks.at(0, ky, kx)), 1e-9);
}

TEST(Fourier, UnitImpulseIsFlatMagnitude) {
    CineSequence img(1, 16, 8);
    img.at(0, 5, 3) = 1.0;
    KSpaceSequence ks = ck::to_kspace(img);
    const double expect = 1.0 / std::sqrt(16.0 * 8.0);
    for (const auto& v : ks.data) ASSERT_NEAR(std::abs(v), expect, 1e-12);
}

TEST(Fourier, MatchesDirectCenteredDftOracle) {
    for (const auto [h, w] : {std::pair{16, 16}, std::pair{12, 10}, std::pair{8, 6}}) {
        CineSequence img = random_sequence(1, h, w, 31 + static_cast<std::uint64_t>(h));
        KSpaceSequence ks = ck::to_kspace(img);
        auto ref = oracle::dft2_centered_loops(img.data, h, w);
        for (std::size_t i = 0; i < ref.size(); ++i)
            ASSERT_LT(std::abs(ks.data[i] - ref[i]), 1e-9) << "h=" << h << " w=" << w;
    }
}

TEST(Fourier, RoundTripBelowTolerance) {
    // Power-of-two and rectangular non-power-of-two extents.
    for (const auto [h, w] : {std::pair{64, 64}, std::pair{32, 48}, std::pair{12, 20}}) {
        CineSequence img = random_sequence(3, h, w, 7 + static_cast<std::uint64_t>(w));
        CineSequence back = ck::from_kspace(ck::to_kspace(img));
        EXPECT_LT(seq_rmse(img, back), 1e-9) << "h=" << h << " w=" << w;
    }
}

TEST(Fourier, ParsevalHoldsToTightTolerance) {
    CineSequence img = random_sequence(2, 32, 32, 99);
    KSpaceSequence ks = ck::to_kspace(img);
    const double ei = energy_image(img);
    const double ek = energy_kspace(ks);
    EXPECT_LT(std::abs(ei - ek) / ei, 1e-10);
}

TEST(Fourier, LinearityOfTransform) {
    CineSequence a = random_sequence(1, 16, 16, 1);
    CineSequence b = random_sequence(1, 16, 16, 2);
    CineSequence sum(1, 16, 16);
    for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] = 2.0 * a.data[i] - 3.0 * b.data[i];
    KSpaceSequence ka = ck::to_kspace(a), kb = ck::to_kspace(b), ksum = ck::to_kspace(sum);
    for (std::size_t i = 0; i < ksum.data.size(); ++i)
        ASSERT_LT(std::abs(ksum.data[i] - (2.0 * ka.data[i] - 3.0 * kb.data[i])), 1e-10);
}

TEST(Fourier, RealInputHasConjugateSymmetry) {
    CineSequence img = random_sequence(1, 16, 12, 5);
    KSpaceSequence ks = ck::to_kspace(img);
    for (int ky = 0; ky < 16; ++ky)
        for (int kx = 0; kx < 12; ++kx) {
            const int my = ck::mirror_index(ky, 16);
            const int mx = ck::mirror_index(kx, 12);
            ASSERT_LT(std::abs(ks.at(0, ky, kx) - std::conj(ks.at(0, my, mx))), 1e-10);
        }
}

TEST(Fourier, MirrorIndexFixedPointsAndInvolution) {
    const int n = 16;
    EXPECT_EQ(ck::mirror_index(n / 2, n), n / 2);  // DC
    EXPECT_EQ(ck::mirror_index(0, n), 0);          // Nyquist
    for (int i = 0; i < n; ++i) EXPECT_EQ(ck::mirror_index(ck::mirror_index(i, n), n), i);
    EXPECT_EQ(ck::mirror_index(9, n), 7);  // symmetric about the DC index
    EXPECT_THROW(ck::mirror_index(0, 15), std::invalid_argument);
    EXPECT_THROW(ck::mirror_index(16, 16), std::invalid_argument);
}

TEST(Fourier, OddExtentsAreRejected) {
    CineSequence img(1, 15, 16);
    EXPECT_THROW(ck::to_kspace(img), std::invalid_argument);
    KSpaceSequence ks(1, 16, 15);
    EXPECT_THROW(ck::from_kspace(ks), std::invalid_argument);
}

TEST(Fourier, LineViewAliasesStorage) {
    KSpaceSequence ks(2, 8, 6);
    auto line = ck::line_view(ks, 1, 3);
    ASSERT_EQ(line.size(), 6u);
    line[2] = {1.5, -2.5};
    EXPECT_EQ(ks.at(1, 3, 2), (std::complex<double>{1.5, -2.5}));
    EXPECT_THROW(ck::line_view(ks, 2, 0), std::invalid_argument);
    EXPECT_THROW(ck::line_view(ks, 0, 8), std::invalid_argument);
}
