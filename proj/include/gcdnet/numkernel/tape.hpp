#ifndef GCDNET_NUMKERNEL_TAPE_HPP
#define GCDNET_NUMKERNEL_TAPE_HPP

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/numkernel/tensor.hpp"

namespace gcdnet::num {

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
};

/// Ordered record of primitive operations. Values are appended in
/// evaluation order; backward() replays the recorded pullbacks in reverse.
///
/// A tape is single-use mutable state: build one per forward pass.
class Tape {
public:
    using Pullback = std::function<void(Tape&, std::size_t)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Records a value that never receives gradients.
    Var constant(Tensor value) { return push(std::move(value), nullptr, false, {}); }

    /// Records a leaf bound to `source`. When `source.requires_grad()`
    /// holds, backward() accumulates into `source.grad()`.
    Var leaf(Tensor& source) {
        return push(source, source.requires_grad() ? &source : nullptr, source.requires_grad(), {});
    }

    Var param(Parameter& p) { return leaf(p.tensor); }

    /// Appends an operation result. `pullback(tape, self)` must read
    /// `adjoint(self)` and accumulate into the adjoints of its inputs.
    Var record(Tensor value, bool needs_grad, Pullback pullback) {
        return push(std::move(value), nullptr, needs_grad, std::move(pullback));
    }

    const Tensor& value(std::size_t id) const { return nodes_[id].value; }
    bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }

    /// Lazily allocated adjoint buffer for node `id`.
    std::vector<double>& adjoint(std::size_t id) {
        auto& node = nodes_[id];
        if (node.adjoint.empty() && node.value.size() != 0) node.adjoint.assign(node.value.size(), 0.0);
        return node.adjoint;
    }
    bool has_adjoint(std::size_t id) const { return !nodes_[id].adjoint.empty(); }

    std::size_t size() const noexcept { return nodes_.size(); }

    /// Reverse sweep from a scalar loss. Gradients of reachable leaves are
    /// added to their bound tensors; unreachable leaves are left untouched.
    void backward(Var loss) {
        if (loss.tape != this) throw ContractError("backward: variable belongs to another tape");
        const Tensor& v = nodes_[loss.id].value;
        if (v.size() != 1) {
            throw ContractError("backward: loss must be a scalar, got shape " + shape_string(v.shape()));
        }
        adjoint(loss.id)[0] += 1.0;
        for (std::size_t id = loss.id + 1; id-- > 0;) {
            auto& node = nodes_[id];
            if (!node.needs_grad || node.adjoint.empty()) continue;
            if (node.pullback) node.pullback(*this, id);
            if (node.source != nullptr) {
                auto& g = node.source->grad();
                for (std::size_t k = 0; k < g.size(); ++k) g[k] += node.adjoint[k];
            }
        }
    }

private:
    struct Node {
        Tensor value;
        std::vector<double> adjoint;
        Tensor* source = nullptr;
        bool needs_grad = false;
        Pullback pullback;
    };

    Var push(Tensor value, Tensor* source, bool needs_grad, Pullback pullback) {
        value.clear_grad();
        value.set_requires_grad(false);
        nodes_.push_back(Node{std::move(value), {}, source, needs_grad, std::move(pullback)});
        return Var{this, nodes_.size() - 1};
    }

    std::vector<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape->value(id); }

} // namespace gcdnet::num

#endif // GCDNET_NUMKERNEL_TAPE_HPP
