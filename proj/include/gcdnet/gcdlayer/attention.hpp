#ifndef GCDNET_GCDLAYER_ATTENTION_HPP
#define GCDNET_GCDLAYER_ATTENTION_HPP

#include <cstddef>
#include <random>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/numkernel/ops.hpp"
#include "gcdnet/protogcd/protogcd.hpp"

namespace gcdnet::layer {

/// Typical and atypical views of the GCD; atypical is the exact negation.
struct PerspectiveGcd {
    std::vector<double> typ;
    std::vector<double> atyp;
};

inline PerspectiveGcd perspective_split(const proto::GcdVector& g) {
    PerspectiveGcd out;
    out.typ = g.g;
    out.atyp.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.atyp[i] = -g.g[i];
    return out;
}

/// Attention weights of one relation and one perspective, stored as sparse
/// rows: row i holds alpha_ij for the neighbors j that took part in the
/// softmax (all of them unless GCD dropout masked some).
using EdgeAttention = num::SparseRows;

struct AttentionOptions {
    double slope = 0.2;
    double gcd_drop = 0.0;
    bool training = false;
};

/// alpha_ij = softmax over N_i of LeakyReLU(g_j). With training and
/// gcd_drop > 0 each edge is dropped independently before the softmax; a
/// node whose edges would all be dropped keeps them all for this pass.
template <typename Rng>
EdgeAttention gcd_attention(std::span<const double> g, const graph::Csr& csr, const AttentionOptions& opt, Rng* rng) {
    if (!(opt.gcd_drop >= 0.0 && opt.gcd_drop < 1.0)) throw ConfigError("gcd_drop must lie in [0, 1)");
    const std::size_t n = csr.offsets.size() - 1;
    if (g.size() != n) {
        throw ShapeError("gcd_attention: " + std::to_string(g.size()) + " GCD values for " + std::to_string(n) + " nodes");
    }
    const bool drop = opt.training && opt.gcd_drop > 0.0;
    if (drop && rng == nullptr) throw ContractError("gcd_attention: GCD dropout needs a random source");
    std::bernoulli_distribution keep_dist(1.0 - opt.gcd_drop);

    EdgeAttention att;
    att.n_rows = n;
    att.n_cols = n;
    att.offsets.assign(1, 0);
    att.cols.reserve(csr.neighbors.size());
    std::vector<double> logits;
    std::vector<std::size_t> segments;
    logits.reserve(csr.neighbors.size());
    segments.reserve(csr.neighbors.size());
    std::vector<char> keep;
    for (std::size_t i = 0; i < n; ++i) {
        const auto nb = csr.row(i);
        keep.assign(nb.size(), 1);
        if (drop && !nb.empty()) {
            bool any = false;
            for (auto& k : keep) {
                k = keep_dist(*rng) ? 1 : 0;
                any = any || k;
            }
            if (!any) keep.assign(nb.size(), 1);
        }
        for (std::size_t e = 0; e < nb.size(); ++e) {
            if (!keep[e]) continue;
            att.cols.push_back(nb[e]);
            logits.push_back(num::leaky_relu(g[nb[e]], opt.slope));
            segments.push_back(i);
        }
        att.offsets.push_back(att.cols.size());
    }
    att.values = num::segment_softmax(logits, segments, n);
    return att;
}

inline EdgeAttention gcd_attention(std::span<const double> g, const graph::Csr& csr, const AttentionOptions& opt = {}) {
    return gcd_attention<std::mt19937_64>(g, csr, opt, nullptr);
}

/// Mean aggregation weights, 1/deg(i) per neighbor.
inline EdgeAttention uniform_attention(const graph::Csr& csr) {
    EdgeAttention att;
    att.n_rows = att.n_cols = csr.offsets.size() - 1;
    att.offsets = csr.offsets;
    att.cols = csr.neighbors;
    att.values.resize(csr.neighbors.size());
    for (std::size_t i = 0; i < att.n_rows; ++i) {
        const double w = 1.0 / static_cast<double>(csr.degree(i));
        for (std::size_t e = csr.offsets[i]; e < csr.offsets[i + 1]; ++e) att.values[e] = w;
    }
    return att;
}

} // namespace gcdnet::layer

#endif // GCDNET_GCDLAYER_ATTENTION_HPP
