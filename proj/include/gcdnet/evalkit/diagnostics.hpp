#ifndef GCDNET_EVALKIT_DIAGNOSTICS_HPP
#define GCDNET_EVALKIT_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/evalkit/metrics.hpp"
#include "gcdnet/gcdlayer/layer.hpp"
#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/numkernel/tensor.hpp"

namespace gcdnet::eval {

struct NodeDistances {
    std::size_t node = 0;
    double gcd = 0.0;
    double d_typ = 0.0;
    double d_atyp = 0.0;
    double d_avg = 0.0;
    double rate_of_change = 0.0;  ///< d_typ / d_avg, 0 when d_avg is 0
};

struct DistanceReport {
    std::vector<NodeDistances> nodes;

    double mean_typ() const { return mean_of(&NodeDistances::d_typ); }
    double mean_atyp() const { return mean_of(&NodeDistances::d_atyp); }
    double mean_avg() const { return mean_of(&NodeDistances::d_avg); }

private:
    double mean_of(double NodeDistances::*field) const {
        if (nodes.empty()) return 0.0;
        double s = 0.0;
        for (const auto& n : nodes) s += n.*field;
        return s / static_cast<double>(nodes.size());
    }
};

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

/// Attention-weighted neighbor distances for one node, pooled over relations:
///   d = sum_{r,j} alpha_ij^r |x_j - x_i| / sum_{r,j} alpha_ij^r
inline NodeDistances node_distances(std::size_t i, const num::Tensor& x,
                                    const std::vector<layer::RelationAttention>& attention) {
    NodeDistances out;
    out.node = i;
    double typ_num = 0.0, typ_den = 0.0, atyp_num = 0.0, atyp_den = 0.0, plain = 0.0;
    std::size_t count = 0;
    for (const auto& ra : attention) {
        if (!ra.atyp) throw ContractError("node_distances: atypical attention required");
        for (std::size_t e = ra.typ.offsets[i]; e < ra.typ.offsets[i + 1]; ++e) {
            const double dist = euclidean(x.row(ra.typ.cols[e]), x.row(i));
            typ_num += ra.typ.values[e] * dist;
            typ_den += ra.typ.values[e];
            plain += dist;
            ++count;
        }
        for (std::size_t e = ra.atyp->offsets[i]; e < ra.atyp->offsets[i + 1]; ++e) {
            const double dist = euclidean(x.row(ra.atyp->cols[e]), x.row(i));
            atyp_num += ra.atyp->values[e] * dist;
            atyp_den += ra.atyp->values[e];
        }
    }
    if (count == 0) throw ContractError("node_distances: node has no neighbors");
    out.d_typ = typ_num / typ_den;
    out.d_atyp = atyp_num / atyp_den;
    out.d_avg = plain / static_cast<double>(count);
    out.rate_of_change = out.d_avg > 0.0 ? out.d_typ / out.d_avg : 0.0;
    return out;
}

/// Samples `sample_size` nodes with at least one neighbor (all of them when
/// fewer exist) and reports their GCD-weighted distances. `x` is the feature
/// matrix the layer aggregates, `attention` the eval-mode weights.
inline DistanceReport gcd_weighted_distances(const graph::MultiRelationGraph& g, const num::Tensor& x,
                                             const std::vector<layer::RelationAttention>& attention,
                                             std::span<const double> gcd, std::size_t sample_size, std::uint64_t seed) {
    if (x.rows() != g.n_nodes() || gcd.size() != g.n_nodes()) {
        throw ShapeError("gcd_weighted_distances: feature/GCD rows do not match the graph");
    }
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < g.n_nodes(); ++i)
        if (g.has_neighbors(i)) candidates.push_back(i);
    std::mt19937_64 rng(seed);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    if (candidates.size() > sample_size) candidates.resize(sample_size);
    std::sort(candidates.begin(), candidates.end());

    DistanceReport report;
    for (auto i : candidates) {
        auto nd = node_distances(i, x, attention);
        nd.gcd = gcd[i];
        report.nodes.push_back(nd);
    }
    return report;
}

struct BinMetrics {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    MetricSet metrics;
};

/// Buckets nodes by GCD over [-1, 1] in bins of `bin_width` and scores each
/// non-empty bucket separately.
inline std::vector<BinMetrics> per_gcd_range_metrics(std::span<const double> scores, std::span<const int> labels,
                                                     std::span<const double> gcd, double bin_width = 0.1,
                                                     double thres = 0.5) {
    if (scores.size() != labels.size() || scores.size() != gcd.size()) {
        throw ShapeError("per_gcd_range_metrics: inputs differ in length");
    }
    if (!(bin_width > 0.0 && bin_width <= 2.0)) throw ConfigError("bin width must lie in (0, 2]");
    const auto n_bins = static_cast<std::size_t>(std::llround(2.0 / bin_width));
    std::vector<std::vector<std::size_t>> members(n_bins);
    for (std::size_t i = 0; i < gcd.size(); ++i) {
        const double pos = (std::clamp(gcd[i], -1.0, 1.0) + 1.0) / bin_width;
        auto b = static_cast<std::size_t>(std::floor(pos));
        if (b >= n_bins) b = n_bins - 1;
        members[b].push_back(i);
    }
    std::vector<BinMetrics> out;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (members[b].empty()) continue;
        std::vector<double> s;
        std::vector<int> y;
        for (auto i : members[b]) {
            s.push_back(scores[i]);
            y.push_back(labels[i]);
        }
        BinMetrics bm;
        bm.lo = -1.0 + static_cast<double>(b) * bin_width;
        bm.hi = b + 1 == n_bins ? 1.0 : -1.0 + static_cast<double>(b + 1) * bin_width;
        bm.count = members[b].size();
        bm.metrics = compute_metrics(s, y, thres);
        out.push_back(bm);
    }
    return out;
}

} // namespace gcdnet::eval

#endif // GCDNET_EVALKIT_DIAGNOSTICS_HPP
