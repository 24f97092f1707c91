#ifndef GCDNET_GRAPHSTORE_GRAPH_HPP
#define GCDNET_GRAPHSTORE_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/numkernel/tensor.hpp"

namespace gcdnet::graph {

enum class Label : std::int8_t { benign = 0, fraud = 1, unlabeled = -1 };

inline int label_code(Label l) { return static_cast<int>(l); }

inline Label label_from_code(long code) {
    switch (code) {
    case 0: return Label::benign;
    case 1: return Label::fraud;
    case -1: return Label::unlabeled;
    default: throw ValidationError("label code must be 0, 1 or -1, got " + std::to_string(code));
    }
}

using Edge = std::pair<std::size_t, std::size_t>;

/// Compressed neighbor lists for one relation.
struct Csr {
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> neighbors;

    std::size_t degree(std::size_t node) const { return offsets[node + 1] - offsets[node]; }
    std::span<const std::size_t> row(std::size_t node) const {
        return {neighbors.data() + offsets[node], degree(node)};
    }
};

/// Immutable node features, labels and per-relation undirected adjacency.
///
/// Input edges are mirrored and deduplicated; each neighbor list is sorted
/// ascending. Self-loops are kept only when they appear in the input.
class MultiRelationGraph {
public:
    MultiRelationGraph() = default;

    MultiRelationGraph(num::Tensor features, std::vector<Label> labels, const std::vector<std::vector<Edge>>& edges)
        : features_(std::move(features)), labels_(std::move(labels)) {
        const std::size_t n = labels_.size();
        if (features_.rows() != n) {
            throw ValidationError("feature matrix has " + std::to_string(features_.rows()) + " rows for " +
                                  std::to_string(n) + " nodes");
        }
        if (features_.rank() != 2) features_ = features_.reshaped({n, features_.cols()});
        adjacency_.reserve(edges.size());
        for (std::size_t r = 0; r < edges.size(); ++r) adjacency_.push_back(build_csr(n, r, edges[r]));
    }

    std::size_t n_nodes() const noexcept { return labels_.size(); }
    std::size_t n_relations() const noexcept { return adjacency_.size(); }
    std::size_t dim() const noexcept { return features_.cols(); }

    const num::Tensor& features() const noexcept { return features_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    Label label(std::size_t node) const { return labels_.at(node); }

    const Csr& relation(std::size_t r) const {
        if (r >= adjacency_.size()) {
            throw BoundsError("relation " + std::to_string(r) + " out of range (" + std::to_string(adjacency_.size()) +
                              " relations)");
        }
        return adjacency_[r];
    }

    std::span<const std::size_t> neighbors(std::size_t node, std::size_t r) const {
        const Csr& csr = relation(r);
        if (node >= n_nodes()) {
            throw BoundsError("node " + std::to_string(node) + " out of range (" + std::to_string(n_nodes()) +
                              " nodes)");
        }
        return csr.row(node);
    }

    std::size_t degree(std::size_t node, std::size_t r) const { return neighbors(node, r).size(); }

    /// Undirected edge count of relation r (a self-loop counts once).
    std::size_t n_edges(std::size_t r) const {
        const Csr& csr = relation(r);
        std::size_t loops = 0;
        for (std::size_t i = 0; i < n_nodes(); ++i)
            for (auto j : csr.row(i))
                if (j == i) ++loops;
        return (csr.neighbors.size() - loops) / 2 + loops;
    }

    bool has_neighbors(std::size_t node) const {
        for (std::size_t r = 0; r < n_relations(); ++r)
            if (adjacency_[r].degree(node) > 0) return true;
        return false;
    }

    std::size_t count(Label l) const { return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), l)); }

private:
    static Csr build_csr(std::size_t n, std::size_t r, const std::vector<Edge>& edges) {
        std::vector<Edge> directed;
        directed.reserve(edges.size() * 2);
        for (const auto& [u, v] : edges) {
            if (u >= n || v >= n) {
                throw ValidationError("relation " + std::to_string(r) + ": edge (" + std::to_string(u) + "," +
                                      std::to_string(v) + ") references a node outside [0," + std::to_string(n) + ")");
            }
            directed.emplace_back(u, v);
            if (u != v) directed.emplace_back(v, u);
        }
        std::sort(directed.begin(), directed.end());
        directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
        Csr csr;
        csr.offsets.assign(n + 1, 0);
        csr.neighbors.reserve(directed.size());
        for (const auto& [u, v] : directed) {
            ++csr.offsets[u + 1];
            csr.neighbors.push_back(v);
        }
        for (std::size_t i = 0; i < n; ++i) csr.offsets[i + 1] += csr.offsets[i];
        return csr;
    }

    num::Tensor features_;
    std::vector<Label> labels_;
    std::vector<Csr> adjacency_;
};

} // namespace gcdnet::graph

#endif // GCDNET_GRAPHSTORE_GRAPH_HPP
