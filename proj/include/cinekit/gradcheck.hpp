#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cinekit/graph.hpp"

namespace ck {

struct GradCheckReport {
    std::string name;
    double max_rel_err = 0.0;
    double tol = 1e-4;
    bool pass = false;
    std::int64_t checked = 0;
};

/// Compares tape gradients against central finite differences of the loss.
///
/// `build` must be a deterministic pure function of the input tensors: it
/// receives a fresh Graph plus one differentiable leaf per input and returns
/// a scalar loss Var. Stochastic ops inside (dropout) must draw from an Rng
/// seeded locally so every invocation sees identical noise.
///
/// The relative error of each element uses a floored denominator so elements
/// with near-zero gradients are judged on an absolute scale.
template <class Build>
GradCheckReport check_gradients(std::string name, std::vector<Tensor> inputs, Build&& build,
                                double h = 1e-4, double tol = 1e-4) {
    GradCheckReport report;
    report.name = std::move(name);
    report.tol = tol;

    auto eval = [&](const std::vector<Tensor>& xs) {
        Graph g;
        std::vector<Var> vars;
        vars.reserve(xs.size());
        for (const Tensor& x : xs) vars.push_back(g.constant(x));
        Var loss = build(g, vars);
        check_arg(g.value(loss).size() == 1, "gradient check requires a scalar loss");
        return g.value(loss)[0];
    };

    std::vector<Tensor> analytic;
    {
        Graph g;
        std::vector<Var> vars;
        vars.reserve(inputs.size());
        for (const Tensor& x : inputs) vars.push_back(g.param(x));
        Var loss = build(g, vars);
        check_arg(g.value(loss).size() == 1, "gradient check requires a scalar loss");
        g.backward(loss);
        for (Var v : vars) analytic.push_back(g.grad(v));
    }

    double max_rel = 0.0;
    std::int64_t checked = 0;
    for (std::size_t ti = 0; ti < inputs.size(); ++ti) {
        for (std::int64_t i = 0; i < inputs[ti].size(); ++i) {
            const double saved = inputs[ti][i];
            inputs[ti][i] = saved + h;
            const double fp = eval(inputs);
            inputs[ti][i] = saved - h;
            const double fm = eval(inputs);
            inputs[ti][i] = saved;
            const double fd = (fp - fm) / (2.0 * h);
            const double a = analytic[ti][i];
            const double denom = std::max({std::abs(a), std::abs(fd), 0.1});
            max_rel = std::max(max_rel, std::abs(a - fd) / denom);
            ++checked;
        }
    }
    report.max_rel_err = max_rel;
    report.checked = checked;
    report.pass = max_rel < tol;
    return report;
}

/// Uniform random tensor in [lo, hi].
inline Tensor random_tensor(std::vector<int> shape, double lo, double hi, Rng& rng) {
    Tensor t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
    return t;
}

/// Uniform random tensor avoiding a band around `kink` (for ops that are
/// non-differentiable there, e.g. relu at zero).
inline Tensor random_tensor_away_from(std::vector<int> shape, double lo, double hi, double kink,
                                      double radius, Rng& rng) {
    Tensor t(std::move(shape));
    for (std::int64_t i = 0; i < t.size(); ++i) {
        double v = rng.uniform(lo, hi);
        while (std::abs(v - kink) < radius) v = rng.uniform(lo, hi);
        t[i] = v;
    }
    return t;
}

}  // namespace ck
