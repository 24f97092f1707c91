#ifndef GCDNET_GRAPHSTORE_SYNTH_HPP
#define GCDNET_GRAPHSTORE_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/graphstore/graph.hpp"

namespace gcdnet::graph {

/// Parameters of the camouflage-graph generator.
struct SynthParams {
    std::size_t n_nodes = 2000;
    double fraud_ratio = 0.15;
    std::size_t dim = 10;
    std::size_t n_relations = 2;
    double avg_degree = 8.0;
    double homophily = 0.6;
    double camouflage_rate = 0.4;
    double camouflage_strength = 0.7;
    /// Per-coordinate distance between the benign (origin) and fraud cluster means.
    double separation = 2.0;
    double unlabeled_fraction = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (n_nodes < 4) throw ConfigError("synth: need at least 4 nodes");
        if (!(fraud_ratio > 0.0 && fraud_ratio < 1.0)) throw ConfigError("synth: fraud_ratio must lie in (0,1)");
        if (dim < 1) throw ConfigError("synth: dim must be >= 1");
        if (!(avg_degree >= 1.0)) throw ConfigError("synth: avg_degree must be >= 1");
        if (avg_degree >= static_cast<double>(n_nodes)) {
            throw ConfigError("synth: avg_degree " + std::to_string(avg_degree) + " is infeasible for " +
                              std::to_string(n_nodes) + " nodes");
        }
        if (!in01(homophily)) throw ConfigError("synth: homophily must lie in [0,1]");
        if (!in01(camouflage_rate)) throw ConfigError("synth: camouflage_rate must lie in [0,1]");
        if (!in01(camouflage_strength)) throw ConfigError("synth: camouflage_strength must lie in [0,1]");
        if (!(unlabeled_fraction >= 0.0 && unlabeled_fraction < 1.0)) {
            throw ConfigError("synth: unlabeled_fraction must lie in [0,1)");
        }
        const auto n_fraud = fraud_count();
        if (n_fraud < 2 || n_nodes - n_fraud < 2) throw ConfigError("synth: each class needs at least 2 nodes");
    }

    std::size_t fraud_count() const {
        return static_cast<std::size_t>(std::floor(static_cast<double>(n_nodes) * fraud_ratio));
    }
};

/// Ground truth the generator knows but the graph does not carry.
struct SynthTruth {
    std::vector<Label> labels;      ///< before masking
    std::vector<bool> camouflaged;  ///< fraud nodes pulled toward the benign mean
};

/// Two Gaussian clusters (benign at the origin, fraud at `separation` in every
/// coordinate, unit variance). A camouflage_rate share of fraud nodes becomes
/// (1 - s) x + s mu_benign. Each relation gets round(n * avg_degree / 2)
/// undirected edges: the source is uniform, the destination is drawn from the
/// source's class with probability `homophily` and from the other class
/// otherwise. Self-loops and repeats are redrawn.
inline MultiRelationGraph generate_synthetic(const SynthParams& p, SynthTruth* truth = nullptr) {
    p.validate();
    const std::size_t n = p.n_nodes;
    const std::size_t d = p.dim;
    std::mt19937_64 rng(p.seed);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Label> labels(n, Label::benign);
    const std::size_t n_fraud = p.fraud_count();
    for (std::size_t k = 0; k < n_fraud; ++k) labels[order[k]] = Label::fraud;

    std::vector<bool> camouflaged(n, false);
    const auto n_camo = static_cast<std::size_t>(std::floor(static_cast<double>(n_fraud) * p.camouflage_rate));
    for (std::size_t k = 0; k < n_camo; ++k) camouflaged[order[k]] = true;

    num::Tensor x = num::Tensor::matrix(n, d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double mean = labels[i] == Label::fraud ? p.separation : 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double v = mean + normal(rng);
            if (camouflaged[i]) v = (1.0 - p.camouflage_strength) * v;  // benign mean is 0
            x(i, j) = v;
        }
    }

    std::vector<std::size_t> fraud_nodes, benign_nodes;
    for (std::size_t i = 0; i < n; ++i) (labels[i] == Label::fraud ? fraud_nodes : benign_nodes).push_back(i);

    const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(n) * p.avg_degree / 2.0));
    std::vector<std::vector<Edge>> edges(p.n_relations);
    std::uniform_int_distribution<std::size_t> pick_node(0, n - 1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::size_t r = 0; r < p.n_relations; ++r) {
        std::set<Edge> seen;
        auto& list = edges[r];
        list.reserve(m);
        std::size_t attempts = 0;
        const std::size_t max_attempts = 50 * m + 1000;
        while (list.size() < m && attempts++ < max_attempts) {
            const std::size_t u = pick_node(rng);
            const bool same = coin(rng) < p.homophily;
            const bool u_fraud = labels[u] == Label::fraud;
            const auto& pool = (same == u_fraud) ? fraud_nodes : benign_nodes;
            const std::size_t v = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
            if (u == v) continue;
            const Edge key{std::min(u, v), std::max(u, v)};
            if (!seen.insert(key).second) continue;
            list.push_back(key);
        }
    }

    const auto n_mask = static_cast<std::size_t>(std::floor(static_cast<double>(n) * p.unlabeled_fraction));
    std::vector<Label> visible = labels;
    if (n_mask > 0) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t k = 0; k < n_mask; ++k) visible[perm[k]] = Label::unlabeled;
    }
    if (truth != nullptr) {
        truth->labels = labels;
        truth->camouflaged = camouflaged;
    }
    return MultiRelationGraph(std::move(x), std::move(visible), edges);
}

/// Fraction of undirected edges (over all relations) joining same-label nodes.
inline double realized_homophily(const MultiRelationGraph& g) {
    std::size_t same = 0, total = 0;
    for (std::size_t r = 0; r < g.n_relations(); ++r)
        for (std::size_t i = 0; i < g.n_nodes(); ++i)
            for (auto j : g.neighbors(i, r)) {
                if (j < i) continue;
                ++total;
                if (g.label(i) == g.label(j)) ++same;
            }
    return total == 0 ? 0.0 : static_cast<double>(same) / static_cast<double>(total);
}

} // namespace gcdnet::graph

#endif // GCDNET_GRAPHSTORE_SYNTH_HPP
