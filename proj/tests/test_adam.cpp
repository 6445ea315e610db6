#include "cinekit/adam.hpp"

#include <gtest/gtest.h>

#include "cinekit/gradcheck.hpp"
#include "oracles.hpp"

using ck::AdamState;
using ck::Rng;
using ck::Tensor;

TEST(Adam, TenStepTrajectoryMatchesReference) {
    Rng rng(2024);
    const int n = 13;
    Tensor p0 = ck::random_tensor({n}, -1.0, 1.0, rng);

    std::vector<Tensor> params = {p0};
    AdamState state;
    state.lr = 1e-4;
    state.beta1 = 0.9;
    state.beta2 = 0.999;
    state.epsilon = 1e-8;

    std::vector<double> ref(p0.data(), p0.data() + n);
    oracle::AdamLoops ref_opt(static_cast<std::size_t>(n), 1e-4, 0.9, 0.999, 1e-8);

    for (int step = 0; step < 10; ++step) {
        Tensor grad = ck::random_tensor({n}, -2.0, 2.0, rng);
        std::vector<double> gvec(grad.data(), grad.data() + n);
        ck::adam_step(params, {grad}, state);
        ref_opt.update(ref, gvec);
        for (int i = 0; i < n; ++i)
            ASSERT_NEAR(params[0][i], ref[static_cast<std::size_t>(i)], 1e-12)
                << "step " << step << " element " << i;
    }
    EXPECT_EQ(state.t, 10);
}

TEST(Adam, FirstStepMovesByLearningRateScale) {
    // With m_hat = g and v_hat = g^2 after bias correction, the first update
    // is approximately lr * sign(g).
    std::vector<Tensor> params = {Tensor::from_data({2}, {1.0, -1.0})};
    AdamState state;
    state.lr = 0.01;
    Tensor grad = Tensor::from_data({2}, {100.0, -0.5});
    ck::adam_step(params, {grad}, state);
    EXPECT_NEAR(params[0][0], 1.0 - 0.01, 1e-6);
    EXPECT_NEAR(params[0][1], -1.0 + 0.01, 1e-6);
}

TEST(Adam, DrivesQuadraticLossDown) {
    std::vector<Tensor> params = {Tensor::from_data({1}, {3.0})};
    AdamState state;
    state.lr = 0.05;
    double prev = 9.0;
    for (int i = 0; i < 200; ++i) {
        Tensor grad = Tensor::from_data({1}, {2.0 * params[0][0]});
        ck::adam_step(params, {grad}, state);
    }
    const double loss = params[0][0] * params[0][0];
    EXPECT_LT(loss, prev * 0.01);
}

TEST(Adam, ZeroGradientLeavesParameterUntouched) {
    std::vector<Tensor> params = {Tensor::from_data({2}, {1.5, -2.5})};
    AdamState state;
    for (int i = 0; i < 3; ++i) ck::adam_step(params, {Tensor({2}, 0.0)}, state);
    EXPECT_EQ(params[0][0], 1.5);
    EXPECT_EQ(params[0][1], -2.5);
}

TEST(Adam, MultiTensorSlotsTrackIndependently) {
    Rng rng(5);
    std::vector<Tensor> params = {ck::random_tensor({3}, -1, 1, rng),
                                  ck::random_tensor({2, 2}, -1, 1, rng)};
    AdamState state;
    state.lr = 0.1;
    const Tensor before1 = params[1];
    ck::adam_step(params, {Tensor({3}, 1.0), Tensor({2, 2}, 0.0)}, state);
    for (std::int64_t i = 0; i < 4; ++i) EXPECT_EQ(params[1][i], before1[i]);
    EXPECT_THROW(ck::adam_step(params, {Tensor({3}, 0.0)}, state), std::invalid_argument);
}

TEST(GaussianInit, UsesFanInScaledSpread) {
    Rng rng(77);
    const std::int64_t fan_in = 50;
    Tensor w = ck::gaussian_init({40, 50}, fan_in, rng);
    double mean = 0.0;
    for (std::int64_t i = 0; i < w.size(); ++i) mean += w[i];
    mean /= static_cast<double>(w.size());
    double var = 0.0;
    for (std::int64_t i = 0; i < w.size(); ++i) var += (w[i] - mean) * (w[i] - mean);
    var /= static_cast<double>(w.size() - 1);
    const double expect_var = 2.0 / static_cast<double>(fan_in);
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(var, expect_var, expect_var * 0.15);
}
