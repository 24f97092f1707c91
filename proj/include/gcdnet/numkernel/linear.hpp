#ifndef GCDNET_NUMKERNEL_LINEAR_HPP
#define GCDNET_NUMKERNEL_LINEAR_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "gcdnet/numkernel/ops.hpp"
#include "gcdnet/numkernel/tape.hpp"
#include "gcdnet/numkernel/tensor.hpp"

namespace gcdnet::num {

/// y = x W + b, W is [in x out].
struct Linear {
    Parameter weight;
    Parameter bias;

    Linear() = default;

    template <typename Rng>
    Linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng)
        : weight(init_parameter(name + ".weight", {in, out}, in, rng)),
          bias(init_parameter(name + ".bias", {1, out}, in, rng)) {}

    std::size_t in_dim() const { return weight.tensor.rows(); }
    std::size_t out_dim() const { return weight.tensor.cols(); }

    Var operator()(Tape& tape, Var x) { return add_row(matmul(x, tape.param(weight)), tape.param(bias)); }

    void collect(std::vector<Parameter*>& out) {
        out.push_back(&weight);
        out.push_back(&bias);
    }
};

/// in -> hidden -> out with LeakyReLU between the two linear maps.
struct Mlp {
    Linear first;
    Linear second;
    double slope = 0.2;

    Mlp() = default;

    template <typename Rng>
    Mlp(const std::string& name, std::size_t in, std::size_t hidden, std::size_t out, Rng& rng)
        : first(name + ".0", in, hidden, rng), second(name + ".1", hidden, out, rng) {}

    Var operator()(Tape& tape, Var x) { return second(tape, leaky_relu(first(tape, x), slope)); }

    void collect(std::vector<Parameter*>& out) {
        first.collect(out);
        second.collect(out);
    }
};

} // namespace gcdnet::num

#endif // GCDNET_NUMKERNEL_LINEAR_HPP
