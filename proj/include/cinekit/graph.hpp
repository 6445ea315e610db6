#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "cinekit/common.hpp"
#include "cinekit/tensor.hpp"

namespace ck {

/// Handle to a node inside a Graph.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

/// Eager reverse-mode tape. Every operation computes its value immediately
/// and records a closure that scatters the output gradient into the input
/// gradient buffers. backward() walks nodes in reverse creation order, which
/// is a valid topological order because inputs always precede outputs.
///
/// A Graph instance represents one forward/backward pass; build a fresh one
/// per training step.
class Graph {
public:
    using BackwardFn = std::function<void(Graph&, const Tensor& grad_out)>;

    Var leaf(Tensor value, bool requires_grad = false) {
        return push(std::move(value), {}, nullptr, requires_grad);
    }

    /// Leaf that participates in differentiation (model parameter).
    Var param(const Tensor& value) { return leaf(value, true); }

    /// Leaf excluded from differentiation (inputs, targets).
    Var constant(const Tensor& value) { return leaf(value, false); }

    const Tensor& value(Var v) const { return nodes_[check_id(v)].value; }

    /// Gradient buffer of v after backward(). Zero tensor if v never
    /// received a contribution (parameter unused by the loss).
    const Tensor& grad(Var v) const {
        const Node& n = nodes_[check_id(v)];
        check_arg(ran_backward_, "grad() requires a prior backward()");
        check_arg(n.requires_grad, "grad() on a node that does not require gradients");
        return n.grad;
    }

    bool wants_grad(Var v) const { return nodes_[check_id(v)].requires_grad; }

    /// Accumulation buffer used by backward closures.
    Tensor& grad_buf(Var v) {
        Node& n = nodes_[check_id(v)];
        if (n.grad.size() == 0) n.grad = Tensor(n.value.shape());
        return n.grad;
    }

    /// Records a custom node. `backward` may be null for non-differentiable
    /// outputs; requires_grad is inherited from the inputs.
    Var make_node(Tensor value, std::vector<Var> inputs, BackwardFn backward) {
        bool req = false;
        std::vector<int> ids;
        ids.reserve(inputs.size());
        for (Var in : inputs) {
            req = req || nodes_[check_id(in)].requires_grad;
            ids.push_back(in.id);
        }
        return push(std::move(value), std::move(ids), req ? std::move(backward) : nullptr, req);
    }

    std::size_t node_count() const { return nodes_.size(); }

    // ----- elementwise -----

    Var add(Var a, Var b) {
        const Tensor& av = value(a);
        const Tensor& bv = value(b);
        require_same_shape(av, bv, "add");
        Tensor out(av.shape());
        for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
        return make_node(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
            g.accumulate(a, go);
            g.accumulate(b, go);
        });
    }

    Var sub(Var a, Var b) {
        const Tensor& av = value(a);
        const Tensor& bv = value(b);
        require_same_shape(av, bv, "sub");
        Tensor out(av.shape());
        for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
        return make_node(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
            g.accumulate(a, go);
            if (g.wants_grad(b)) {
                Tensor& gb = g.grad_buf(b);
                for (std::int64_t i = 0; i < go.size(); ++i) gb[i] -= go[i];
            }
        });
    }

    Var mul(Var a, Var b) {
        const Tensor& av = value(a);
        const Tensor& bv = value(b);
        require_same_shape(av, bv, "mul");
        Tensor out(av.shape());
        for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
        return make_node(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
            if (g.wants_grad(a)) {
                Tensor& ga = g.grad_buf(a);
                const Tensor& bv = g.value(b);
                for (std::int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * bv[i];
            }
            if (g.wants_grad(b)) {
                Tensor& gb = g.grad_buf(b);
                const Tensor& av = g.value(a);
                for (std::int64_t i = 0; i < go.size(); ++i) gb[i] += go[i] * av[i];
            }
        });
    }

    Var scale(Var a, double c) {
        const Tensor& av = value(a);
        Tensor out(av.shape());
        for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] * c;
        return make_node(std::move(out), {a}, [a, c](Graph& g, const Tensor& go) {
            if (!g.wants_grad(a)) return;
            Tensor& ga = g.grad_buf(a);
            for (std::int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * c;
        });
    }

    // ----- activations -----

    /// max(0, x); subgradient 0 at x == 0.
    Var relu(Var a) {
        const Tensor& av = value(a);
        Tensor out(av.shape());
        for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i] > 0.0 ? av[i] : 0.0;
        return make_node(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
            if (!g.wants_grad(a)) return;
            Tensor& ga = g.grad_buf(a);
            const Tensor& av = g.value(a);
            for (std::int64_t i = 0; i < go.size(); ++i)
                if (av[i] > 0.0) ga[i] += go[i];
        });
    }

    Var sigmoid(Var a) {
        const Tensor& av = value(a);
        Tensor out(av.shape());
        for (std::int64_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-av[i]));
        Var self = make_node(std::move(out), {a}, nullptr);
        // Needs its own output value; install backward after creation.
        nodes_[static_cast<std::size_t>(self.id)].backward = [a, self](Graph& g,
                                                                       const Tensor& go) {
            if (!g.wants_grad(a)) return;
            Tensor& ga = g.grad_buf(a);
            const Tensor& s = g.value(self);
            for (std::int64_t i = 0; i < go.size(); ++i) ga[i] += go[i] * s[i] * (1.0 - s[i]);
        };
        return self;
    }

    /// Inverted dropout: kept activations are scaled by 1/(1-p) at training
    /// time so inference is the identity.
    Var dropout(Var a, double p, bool training, Rng& rng) {
        check_arg(p >= 0.0 && p < 1.0, "dropout probability must be in [0, 1)");
        const Tensor& av = value(a);
        if (!training || p == 0.0) {
            Tensor out = av;
            return make_node(std::move(out), {a},
                             [a](Graph& g, const Tensor& go) { g.accumulate(a, go); });
        }
        const double keep_scale = 1.0 / (1.0 - p);
        auto mask = std::make_shared<std::vector<double>>(static_cast<std::size_t>(av.size()));
        Tensor out(av.shape());
        for (std::int64_t i = 0; i < out.size(); ++i) {
            const bool keep = rng.uniform() >= p;
            (*mask)[static_cast<std::size_t>(i)] = keep ? keep_scale : 0.0;
            out[i] = av[i] * (*mask)[static_cast<std::size_t>(i)];
        }
        return make_node(std::move(out), {a}, [a, mask](Graph& g, const Tensor& go) {
            if (!g.wants_grad(a)) return;
            Tensor& ga = g.grad_buf(a);
            for (std::int64_t i = 0; i < go.size(); ++i)
                ga[i] += go[i] * (*mask)[static_cast<std::size_t>(i)];
        });
    }

    // ----- shape -----

    Var reshape(Var a, std::vector<int> new_shape) {
        const Tensor& av = value(a);
        std::int64_t n = 1;
        for (int d : new_shape) n *= d;
        check_arg(n == av.size(), "reshape: element count mismatch");
        Tensor out(std::move(new_shape));
        for (std::int64_t i = 0; i < out.size(); ++i) out[i] = av[i];
        return make_node(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
            if (!g.wants_grad(a)) return;
            Tensor& ga = g.grad_buf(a);
            for (std::int64_t i = 0; i < go.size(); ++i) ga[i] += go[i];
        });
    }

    /// Selects index `c` along the leading axis, dropping that axis.
    Var select0(Var a, int c) {
        const Tensor& av = value(a);
        check_arg(av.rank() >= 1, "select0 requires rank >= 1");
        check_arg(c >= 0 && c < av.dim(0), "select0 index out of range");
        std::vector<int> out_shape(av.shape().begin() + 1, av.shape().end());
        if (out_shape.empty()) out_shape.push_back(1);
        Tensor out(out_shape);
        const std::int64_t stride = out.size();
        for (std::int64_t i = 0; i < stride; ++i) out[i] = av[c * stride + i];
        return make_node(std::move(out), {a}, [a, c, stride](Graph& g, const Tensor& go) {
            if (!g.wants_grad(a)) return;
            Tensor& ga = g.grad_buf(a);
            for (std::int64_t i = 0; i < stride; ++i) ga[c * stride + i] += go[i];
        });
    }

    // ----- reductions and losses -----

    Var sum(Var a) {
        const Tensor& av = value(a);
        double s = 0.0;
        for (std::int64_t i = 0; i < av.size(); ++i) s += av[i];
        Tensor out({1});
        out[0] = s;
        return make_node(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
            if (!g.wants_grad(a)) return;
            Tensor& ga = g.grad_buf(a);
            for (std::int64_t i = 0; i < ga.size(); ++i) ga[i] += go[0];
        });
    }

    Var mean(Var a) {
        const Tensor& av = value(a);
        const double inv_n = 1.0 / static_cast<double>(av.size());
        double s = 0.0;
        for (std::int64_t i = 0; i < av.size(); ++i) s += av[i];
        Tensor out({1});
        out[0] = s * inv_n;
        return make_node(std::move(out), {a}, [a, inv_n](Graph& g, const Tensor& go) {
            if (!g.wants_grad(a)) return;
            Tensor& ga = g.grad_buf(a);
            for (std::int64_t i = 0; i < ga.size(); ++i) ga[i] += go[0] * inv_n;
        });
    }

    /// Mean squared error against a fixed target.
    Var mse(Var pred, const Tensor& target) {
        const Tensor& pv = value(pred);
        require_same_shape(pv, target, "mse");
        const double inv_n = 1.0 / static_cast<double>(pv.size());
        double s = 0.0;
        for (std::int64_t i = 0; i < pv.size(); ++i) {
            const double d = pv[i] - target[i];
            s += d * d;
        }
        Tensor out({1});
        out[0] = s * inv_n;
        auto tgt = std::make_shared<Tensor>(target);
        return make_node(std::move(out), {pred}, [pred, tgt, inv_n](Graph& g, const Tensor& go) {
            if (!g.wants_grad(pred)) return;
            Tensor& gp = g.grad_buf(pred);
            const Tensor& pv = g.value(pred);
            const double c = 2.0 * inv_n * go[0];
            for (std::int64_t i = 0; i < gp.size(); ++i) gp[i] += c * (pv[i] - (*tgt)[i]);
        });
    }

    /// Mean binary cross-entropy against fixed 0/1 targets. Probabilities
    /// are clamped to [eps, 1-eps] before the logs; the gradient is zero for
    /// elements sitting in the clamped region.
    Var bce(Var prob, const Tensor& target, double eps = 1e-7) {
        const Tensor& pv = value(prob);
        require_same_shape(pv, target, "bce");
        check_arg(eps > 0.0 && eps < 0.5, "bce clamp must be in (0, 0.5)");
        const double inv_n = 1.0 / static_cast<double>(pv.size());
        double s = 0.0;
        for (std::int64_t i = 0; i < pv.size(); ++i) {
            const double y = target[i];
            check_arg(y == 0.0 || y == 1.0, "bce targets must be 0 or 1");
            const double p = std::min(1.0 - eps, std::max(eps, pv[i]));
            s -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        }
        Tensor out({1});
        out[0] = s * inv_n;
        auto tgt = std::make_shared<Tensor>(target);
        return make_node(std::move(out), {prob},
                         [prob, tgt, inv_n, eps](Graph& g, const Tensor& go) {
                             if (!g.wants_grad(prob)) return;
                             Tensor& gp = g.grad_buf(prob);
                             const Tensor& pv = g.value(prob);
                             const double c = inv_n * go[0];
                             for (std::int64_t i = 0; i < gp.size(); ++i) {
                                 if (pv[i] < eps || pv[i] > 1.0 - eps) continue;
                                 const double p = pv[i];
                                 const double y = (*tgt)[i];
                                 gp[i] += c * (-y / p + (1.0 - y) / (1.0 - p));
                             }
                         });
    }

    // ----- backward -----

    /// Seeds d(loss)/d(loss) = 1 and propagates through the tape. `loss`
    /// must be scalar. May be called once per graph.
    void backward(Var loss) {
        const Node& ln = nodes_[check_id(loss)];
        check_arg(ln.value.size() == 1, "backward() requires a scalar loss");
        check_arg(!ran_backward_, "backward() may run only once per graph");
        ran_backward_ = true;
        for (Node& n : nodes_)
            if (n.requires_grad && n.grad.size() == 0) n.grad = Tensor(n.value.shape());
        if (!ln.requires_grad) return;
        grad_buf(loss)[0] = 1.0;
        for (int i = loss.id; i >= 0; --i) {
            Node& n = nodes_[static_cast<std::size_t>(i)];
            if (n.backward && n.requires_grad) n.backward(*this, n.grad);
        }
    }

    /// Adds go elementwise into the gradient buffer of v (no-op when v does
    /// not require gradients).
    void accumulate(Var v, const Tensor& go) {
        if (!wants_grad(v)) return;
        Tensor& gv = grad_buf(v);
        for (std::int64_t i = 0; i < go.size(); ++i) gv[i] += go[i];
    }

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::vector<int> inputs;
        BackwardFn backward;
        bool requires_grad = false;
    };

    Var push(Tensor value, std::vector<int> inputs, BackwardFn backward, bool requires_grad) {
        Node n;
        n.value = std::move(value);
        n.inputs = std::move(inputs);
        n.backward = std::move(backward);
        n.requires_grad = requires_grad;
        nodes_.push_back(std::move(n));
        return Var{static_cast<int>(nodes_.size()) - 1};
    }

    std::size_t check_id(Var v) const {
        check_arg(v.id >= 0 && v.id < static_cast<int>(nodes_.size()), "invalid graph handle");
        return static_cast<std::size_t>(v.id);
    }

    std::vector<Node> nodes_;
    bool ran_backward_ = false;
};

}  // namespace ck
