// Shared helpers for the unit and acceptance suites.
#ifndef GCDNET_TESTS_SUPPORT_HPP
#define GCDNET_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/numkernel/tape.hpp"
#include "gcdnet/numkernel/tensor.hpp"

namespace gcdnet::testkit {

/// Relative error with a floor on the denominator, so gradients that are
/// numerically zero compare on an absolute scale.
inline double rel_error(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

/// Compares tape gradients of `loss(tape)` w.r.t. every entry of `leaves`
/// with central differences at step h.
inline GradCheck check_gradients(const std::vector<num::Tensor*>& leaves,
                                 const std::function<num::Var(num::Tape&)>& loss, double h = 1e-5,
                                 double floor = 1e-6) {
    for (auto* t : leaves) {
        t->set_requires_grad(true);
        t->clear_grad();
    }
    {
        num::Tape tape;
        tape.backward(loss(tape));
    }
    std::vector<std::vector<double>> analytic;
    for (auto* t : leaves) analytic.push_back(t->has_grad() ? t->grad() : std::vector<double>(t->size(), 0.0));

    auto value = [&] {
        num::Tape tape;
        return loss(tape).value()[0];
    };
    GradCheck out;
    for (std::size_t l = 0; l < leaves.size(); ++l) {
        auto& data = leaves[l]->storage();
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double orig = data[k];
            data[k] = orig + h;
            const double up = value();
            data[k] = orig - h;
            const double down = value();
            data[k] = orig;
            const double fd = (up - down) / (2.0 * h);
            out.max_rel_error = std::max(out.max_rel_error, rel_error(analytic[l][k], fd, floor));
            ++out.checked;
        }
    }
    for (auto* t : leaves) t->clear_grad();
    return out;
}

inline num::Tensor random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                                 double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    num::Tensor t = num::Tensor::matrix(rows, cols);
    for (double& v : t.storage()) v = u(rng);
    return t;
}

/// Random labeled graph with Erdos-Renyi relations; every node has at least
/// one neighbor in relation 0 and both classes appear at least `min_class` times.
inline graph::MultiRelationGraph random_graph(std::size_t n, std::size_t dim, std::size_t relations, double p_edge,
                                             std::mt19937_64& rng, std::size_t min_class = 2) {
    auto x = random_matrix(n, dim, rng);
    std::vector<graph::Label> labels(n, graph::Label::benign);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution fraud(0.3);
    for (std::size_t k = 0; k < n; ++k) {
        if (k < min_class) labels[order[k]] = graph::Label::fraud;
        else if (k < 2 * min_class) labels[order[k]] = graph::Label::benign;
        else labels[order[k]] = fraud(rng) ? graph::Label::fraud : graph::Label::benign;
    }
    std::bernoulli_distribution coin(p_edge);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::vector<graph::Edge>> edges(relations);
    for (std::size_t r = 0; r < relations; ++r) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (coin(rng)) edges[r].push_back({i, j});
    }
    if (relations > 0) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = pick(rng);
            while (j == i) j = pick(rng);
            edges[0].push_back({i, j});
        }
    }
    return graph::MultiRelationGraph(std::move(x), std::move(labels), edges);
}

} // namespace gcdnet::testkit

#endif // GCDNET_TESTS_SUPPORT_HPP
