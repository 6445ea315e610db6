#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cinekit/common.hpp"
#include "cinekit/graph.hpp"
#include "cinekit/tensor.hpp"

namespace ck {

/// First/second moment accumulators plus the shared step counter. One state
/// covers a whole parameter list; slot i tracks parameter i.
struct AdamState {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t t = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;

    void reset(const std::vector<Tensor>& params) {
        t = 0;
        m.clear();
        v.clear();
        for (const Tensor& p : params) {
            m.emplace_back(p.shape());
            v.emplace_back(p.shape());
        }
    }
};

/// One Adam update over a parameter list. Bias correction uses the explicit
/// m_hat = m/(1-beta1^t), v_hat = v/(1-beta2^t) form, and the step is
/// p -= lr * m_hat / (sqrt(v_hat) + epsilon).
inline void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
                      AdamState& state) {
    check_arg(params.size() == grads.size(), "adam_step: parameter/gradient count mismatch");
    if (state.m.size() != params.size()) state.reset(params);
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& p = params[pi];
        const Tensor& g = grads[pi];
        require_same_shape(p, g, "adam_step");
        Tensor& m = state.m[pi];
        Tensor& v = state.v[pi];
        for (std::int64_t i = 0; i < p.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

/// Named parameter list with its optimizer state. Networks register their
/// tensors here; a training step collects gradients in registration order
/// and calls step().
class ParamSet {
public:
    int add(std::string name, Tensor init) {
        names_.push_back(std::move(name));
        tensors_.push_back(std::move(init));
        return static_cast<int>(tensors_.size()) - 1;
    }

    std::size_t count() const { return tensors_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    Tensor& tensor(std::size_t i) { return tensors_[i]; }
    const Tensor& tensor(std::size_t i) const { return tensors_[i]; }
    std::vector<Tensor>& tensors() { return tensors_; }
    const std::vector<Tensor>& tensors() const { return tensors_; }

    AdamState& adam() { return adam_; }

    /// Binds every parameter into g as a differentiable leaf; vars[i]
    /// corresponds to tensor(i).
    std::vector<Var> bind(Graph& g) const {
        std::vector<Var> vars;
        vars.reserve(tensors_.size());
        for (const Tensor& t : tensors_) vars.push_back(g.param(t));
        return vars;
    }

    /// Reads the gradients of previously bound vars, in slot order.
    std::vector<Tensor> collect_grads(const Graph& g, const std::vector<Var>& vars) const {
        check_arg(vars.size() == tensors_.size(), "collect_grads: var count mismatch");
        std::vector<Tensor> grads;
        grads.reserve(vars.size());
        for (Var v : vars) grads.push_back(g.grad(v));
        return grads;
    }

    void step(const std::vector<Tensor>& grads) { adam_step(tensors_, grads, adam_); }

    /// Total scalar count across all tensors.
    std::int64_t scalar_count() const {
        std::int64_t n = 0;
        for (const Tensor& t : tensors_) n += t.size();
        return n;
    }

private:
    std::vector<std::string> names_;
    std::vector<Tensor> tensors_;
    AdamState adam_;
};

/// Gaussian fan-in initialization: stddev = sqrt(2 / fan_in).
inline Tensor gaussian_init(std::vector<int> shape, std::int64_t fan_in, Rng& rng) {
    check_arg(fan_in > 0, "gaussian_init: fan_in must be positive");
    Tensor t(std::move(shape));
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, stddev);
    return t;
}

}  // namespace ck
