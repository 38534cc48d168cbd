#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tsf/ad/tensor.hpp"
#include "tsf/error.hpp"

namespace tsf::ad {

enum class OpKind {
    Constant,
    Variable,
    Parameter,
    MatMul,
    Add,
    Sub,
    Mul,
    Scale,
    Sigmoid,
    Tanh,
    Relu,
    SliceCols,
    ConcatCols,
    Reshape,
    Conv1d,
    Sum,
    Mean,
    MseLoss,
    MaeLoss,
    HuberLoss,
};

class Tape;

/// Handle to a node on a tape.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

/**
 * Append-only record of a forward computation for reverse-mode differentiation.
 *
 * Nodes only reference earlier nodes, so creation order is a topological order
 * and backward() walks it in reverse. A tape is single-use and single-threaded;
 * build a fresh one per forward pass.
 */
class Tape {
public:
    /// Receives the tape and this node's id; reads grad(id) and adds into its inputs.
    using BackwardFn = std::function<void(Tape&, std::size_t)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value) { return push(OpKind::Constant, {}, std::move(value), false, nullptr, {}); }

    /// Leaf that collects a gradient readable through gradient().
    Var variable(Tensor value) { return push(OpKind::Variable, {}, std::move(value), true, nullptr, {}); }

    /// Binds a parameter; repeated calls on one tape return the same node so shared weights accumulate.
    Var parameter(Parameter& p) {
        if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
        Var v = push(OpKind::Parameter, {}, p.value, true, &p, {});
        param_nodes_.emplace(&p, v.id);
        return v;
    }

    Var record(OpKind kind, std::vector<std::size_t> inputs, Tensor value, BackwardFn backward) {
        bool needs = false;
        for (auto i : inputs) needs = needs || nodes_.at(i).requires_grad;
        return push(kind, std::move(inputs), std::move(value), needs, nullptr, needs ? std::move(backward) : BackwardFn{});
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
    OpKind kind(std::size_t id) const { return nodes_.at(id).kind; }
    const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_.at(id).inputs; }
    bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }

    /// Adjoint of a node, allocated as zeros on first access.
    Tensor& grad(std::size_t id) {
        auto& n = nodes_.at(id);
        if (!n.has_adjoint) {
            n.adjoint = Tensor(n.value.shape(), 0.0);
            n.has_adjoint = true;
        }
        return n.adjoint;
    }

    /// Gradient of the last backward() target w.r.t. a node (zeros if unreached).
    Tensor gradient(Var v) {
        const auto& n = nodes_.at(v.id);
        return n.has_adjoint ? n.adjoint : Tensor(n.value.shape(), 0.0);
    }

    /**
     * Seeds d(loss)/d(loss) = 1, propagates in exact reverse creation order and
     * adds each bound parameter's adjoint into Parameter::grad.
     */
    void backward(Var loss) {
        if (loss.tape != this) throw ContractError("backward: loss node belongs to another tape");
        const auto& ln = nodes_.at(loss.id);
        if (ln.value.numel() != 1)
            throw ContractError("backward: loss must be scalar, got shape " + shape_string(ln.value.shape()));
        for (auto& n : nodes_) {
            n.has_adjoint = false;
            n.adjoint = Tensor();
        }
        grad(loss.id).fill(1.0);
        for (std::size_t i = loss.id + 1; i-- > 0;) {
            auto& n = nodes_[i];
            if (!n.has_adjoint || !n.backward) continue;
            n.backward(*this, i);
        }
        for (auto& n : nodes_) {
            if (n.param == nullptr || !n.has_adjoint) continue;
            auto& g = n.param->grad.storage();
            const auto& a = n.adjoint.storage();
            for (std::size_t k = 0; k < g.size(); ++k) g[k] += a[k];
        }
    }

private:
    struct Node {
        OpKind kind;
        std::vector<std::size_t> inputs;
        Tensor value;
        Tensor adjoint;
        bool requires_grad = false;
        bool has_adjoint = false;
        BackwardFn backward;
        Parameter* param = nullptr;
    };

    Var push(OpKind kind, std::vector<std::size_t> inputs, Tensor value, bool requires_grad, Parameter* param,
             BackwardFn backward) {
        nodes_.push_back(Node{kind, std::move(inputs), std::move(value), Tensor(), requires_grad, false,
                              std::move(backward), param});
        return Var{this, nodes_.size() - 1};
    }

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, std::size_t> param_nodes_;
};

inline const Tensor& Var::value() const {
    if (tape == nullptr) throw ContractError("unbound Var");
    return tape->value(id);
}

}  // namespace tsf::ad
