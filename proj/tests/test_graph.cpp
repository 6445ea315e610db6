#include "cinekit/graph.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "cinekit/gradcheck.hpp"

using ck::Graph;
using ck::Rng;
using ck::Tensor;
using ck::Var;

namespace {

Tensor scalar(double v) { return Tensor::from_data({1}, {v}); }

}  // namespace

TEST(Graph, ElementwiseValues) {
    Graph g;
    Var a = g.constant(Tensor::from_data({3}, {1.0, -2.0, 3.0}));
    Var b = g.constant(Tensor::from_data({3}, {0.5, 4.0, -1.0}));
    EXPECT_EQ(g.value(g.add(a, b))[1], 2.0);
    EXPECT_EQ(g.value(g.sub(a, b))[0], 0.5);
    EXPECT_EQ(g.value(g.mul(a, b))[2], -3.0);
    EXPECT_EQ(g.value(g.scale(a, -2.0))[0], -2.0);
}

TEST(Graph, ShapeMismatchThrows) {
    Graph g;
    Var a = g.constant(Tensor({2, 3}));
    Var b = g.constant(Tensor({3, 2}));
    EXPECT_THROW(g.add(a, b), std::invalid_argument);
    EXPECT_THROW(g.mul(a, b), std::invalid_argument);
}

// Diamond-shaped reuse: f(x) = x*x + x, df/dx = 2x + 1. Exercises gradient
// accumulation when one node feeds several consumers.
TEST(Graph, ReusedNodeAccumulatesGradient) {
    Graph g;
    Var x = g.param(scalar(3.0));
    Var loss = g.sum(g.add(g.mul(x, x), x));
    g.backward(loss);
    EXPECT_DOUBLE_EQ(g.grad(x)[0], 7.0);
}

TEST(Graph, ChainRuleMatchesHandDerivative) {
    // f(x) = mean(relu(2x) * x); at x = (1, -1): f = (2*1 + 0)/2 = 1.
    // df/dx1 = (4*x1)/2 = 2, df/dx2 = 0.
    Graph g;
    Var x = g.param(Tensor::from_data({2}, {1.0, -1.0}));
    Var loss = g.mean(g.mul(g.relu(g.scale(x, 2.0)), x));
    g.backward(loss);
    EXPECT_DOUBLE_EQ(g.value(loss)[0], 1.0);
    EXPECT_DOUBLE_EQ(g.grad(x)[0], 2.0);
    EXPECT_DOUBLE_EQ(g.grad(x)[1], 0.0);
}

TEST(Graph, ReluSubgradientZeroAtKink) {
    Graph g;
    Var x = g.param(Tensor::from_data({3}, {-1.0, 0.0, 2.0}));
    Var loss = g.sum(g.relu(x));
    g.backward(loss);
    EXPECT_EQ(g.grad(x)[0], 0.0);
    EXPECT_EQ(g.grad(x)[1], 0.0);  // subgradient convention at exactly zero
    EXPECT_EQ(g.grad(x)[2], 1.0);
}

TEST(Graph, SigmoidValueAndGradient) {
    Graph g;
    Var x = g.param(scalar(0.0));
    Var s = g.sigmoid(x);
    EXPECT_DOUBLE_EQ(g.value(s)[0], 0.5);
    g.backward(g.sum(s));
    EXPECT_DOUBLE_EQ(g.grad(x)[0], 0.25);
}

TEST(Graph, SumAndMean) {
    Graph g;
    Var x = g.param(Tensor::from_data({4}, {1.0, 2.0, 3.0, 4.0}));
    EXPECT_DOUBLE_EQ(g.value(g.sum(x))[0], 10.0);
    Var m = g.mean(x);
    EXPECT_DOUBLE_EQ(g.value(m)[0], 2.5);
    g.backward(m);
    EXPECT_DOUBLE_EQ(g.grad(x)[2], 0.25);
}

TEST(Graph, ReshapeAndSelectRouteGradients) {
    Graph g;
    Var x = g.param(Tensor::from_data({2, 2}, {1.0, 2.0, 3.0, 4.0}));
    Var r = g.reshape(x, {4});
    EXPECT_EQ(g.value(r).rank(), 1);
    Var row = g.select0(x, 1);
    EXPECT_DOUBLE_EQ(g.value(row)[0], 3.0);
    g.backward(g.sum(row));
    EXPECT_DOUBLE_EQ(g.grad(x)[0], 0.0);
    EXPECT_DOUBLE_EQ(g.grad(x)[2], 1.0);
    EXPECT_THROW(g.reshape(x, {3}), std::invalid_argument);
}

TEST(Graph, MseValueAndGradient) {
    Graph g;
    Var p = g.param(Tensor::from_data({2}, {1.0, 3.0}));
    Tensor target = Tensor::from_data({2}, {0.0, 1.0});
    Var loss = g.mse(p, target);
    // ((1-0)^2 + (3-1)^2) / 2 = 2.5.
    EXPECT_DOUBLE_EQ(g.value(loss)[0], 2.5);
    g.backward(loss);
    EXPECT_DOUBLE_EQ(g.grad(p)[0], 1.0);  // 2*(1-0)/2
    EXPECT_DOUBLE_EQ(g.grad(p)[1], 2.0);  // 2*(3-1)/2
}

TEST(Graph, BceMatchesClosedForm) {
    Graph g;
    Var p = g.param(Tensor::from_data({1}, {0.5}));
    Var loss = g.bce(p, Tensor::from_data({1}, {1.0}));
    EXPECT_NEAR(g.value(loss)[0], std::log(2.0), 1e-15);
    g.backward(loss);
    EXPECT_DOUBLE_EQ(g.grad(p)[0], -2.0);  // -y/p = -1/0.5
}

TEST(Graph, BceClampsExtremesAndZeroesTheirGradient) {
    // pr == y exactly: the clamp caps the per-line loss near eps, not at 0.
    Graph g;
    Var p = g.param(Tensor::from_data({2}, {1.0, 0.0}));
    Var loss = g.bce(p, Tensor::from_data({2}, {1.0, 0.0}));
    const double per_line = -std::log(1.0 - 1e-7);
    EXPECT_GT(g.value(loss)[0], 5e-8);
    EXPECT_LT(g.value(loss)[0], 3e-7);
    EXPECT_NEAR(g.value(loss)[0], per_line, 1e-9);
    g.backward(loss);
    EXPECT_EQ(g.grad(p)[0], 0.0);
    EXPECT_EQ(g.grad(p)[1], 0.0);
}

TEST(Graph, BceRejectsNonBinaryTargets) {
    Graph g;
    Var p = g.param(scalar(0.5));
    EXPECT_THROW(g.bce(p, scalar(0.25)), std::invalid_argument);
}

TEST(Graph, DropoutIdentityAtInference) {
    Rng rng(7);
    Graph g;
    Tensor x = Tensor::from_data({4}, {1.0, 2.0, 3.0, 4.0});
    Var v = g.param(x);
    Var d = g.dropout(v, 0.2, /*training=*/false, rng);
    for (std::int64_t i = 0; i < 4; ++i) EXPECT_EQ(g.value(d)[i], x[i]);
    g.backward(g.sum(d));
    for (std::int64_t i = 0; i < 4; ++i) EXPECT_EQ(g.grad(v)[i], 1.0);
}

TEST(Graph, DropoutScalesKeptUnitsAndMatchesBackward) {
    Rng rng(21);
    Graph g;
    Tensor x({1000}, 1.0);
    Var v = g.param(x);
    Var d = g.dropout(v, 0.25, /*training=*/true, rng);
    g.backward(g.sum(d));
    int kept = 0;
    for (std::int64_t i = 0; i < x.size(); ++i) {
        const double y = g.value(d)[i];
        ASSERT_TRUE(y == 0.0 || std::abs(y - 1.0 / 0.75) < 1e-12);
        EXPECT_EQ(g.grad(v)[i], y);  // input is all-ones, so grad == mask scale
        kept += y != 0.0;
    }
    EXPECT_NEAR(kept / 1000.0, 0.75, 0.06);
}

TEST(Graph, DropoutRejectsBadProbability) {
    Rng rng(3);
    Graph g;
    Var v = g.param(scalar(1.0));
    EXPECT_THROW(g.dropout(v, 1.0, true, rng), std::invalid_argument);
    EXPECT_THROW(g.dropout(v, -0.1, true, rng), std::invalid_argument);
}

TEST(Graph, UnusedParameterGetsZeroGradient) {
    Graph g;
    Var used = g.param(scalar(2.0));
    Var unused = g.param(Tensor({3, 3}, 1.0));
    g.backward(g.sum(g.mul(used, used)));
    EXPECT_DOUBLE_EQ(g.grad(used)[0], 4.0);
    const Tensor& gz = g.grad(unused);
    for (std::int64_t i = 0; i < gz.size(); ++i) EXPECT_EQ(gz[i], 0.0);
}

TEST(Graph, BackwardRequiresScalarAndRunsOnce) {
    Graph g;
    Var x = g.param(Tensor({2}, 1.0));
    Var y = g.scale(x, 2.0);
    EXPECT_THROW(g.backward(y), std::invalid_argument);
    Var s = g.sum(y);
    g.backward(s);
    EXPECT_THROW(g.backward(s), std::invalid_argument);
}

TEST(Graph, GradBeforeBackwardThrows) {
    Graph g;
    Var x = g.param(scalar(1.0));
    EXPECT_THROW(g.grad(x), std::invalid_argument);
}

// Finite differences over the elementwise/reduction/loss ops composed into
// one expression.
TEST(Graph, CompositeExpressionPassesFiniteDifferenceCheck) {
    Rng rng(11);
    Tensor a = ck::random_tensor({3, 4}, -1.0, 1.0, rng);
    // Keep a - b away from the relu kink so central differences are valid.
    Tensor delta = ck::random_tensor_away_from({3, 4}, -1.0, 1.0, 0.0, 0.05, rng);
    Tensor b = a;
    for (std::int64_t i = 0; i < b.size(); ++i) b[i] += delta[i];
    auto report = ck::check_gradients(
        "composite", {a, b}, [](Graph& g, const std::vector<Var>& in) {
            Var s = g.sigmoid(g.mul(in[0], in[1]));
            Var r = g.relu(g.sub(in[0], in[1]));
            return g.add(g.mean(g.mul(s, s)), g.mse(r, Tensor({3, 4}, 0.1)));
        });
    EXPECT_TRUE(report.pass) << report.name << " max rel err " << report.max_rel_err;
}
