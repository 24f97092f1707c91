#ifndef GCDNET_GRAPHSTORE_SPLIT_HPP
#define GCDNET_GRAPHSTORE_SPLIT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/graphstore/graph.hpp"

namespace gcdnet::graph {

enum class Split : std::uint8_t { train, valid, test, none };

inline const char* split_name(Split s) {
    switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
    default: return "none";
    }
}

struct SplitAssignment {
    std::vector<Split> role;
    std::uint64_t seed = 0;

    std::vector<std::size_t> nodes(Split s) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < role.size(); ++i)
            if (role[i] == s) out.push_back(i);
        return out;
    }
};

/// Partition sizes for `count` items: boundaries at round(count * cumulative ratio).
inline std::array<std::size_t, 3> partition_sizes(std::size_t count, const std::array<double, 3>& ratios) {
    const double total = ratios[0] + ratios[1] + ratios[2];
    const double c = static_cast<double>(count);
    const auto b1 = static_cast<std::size_t>(std::llround(c * ratios[0] / total));
    const auto b2 = std::max(b1, static_cast<std::size_t>(std::llround(c * (ratios[0] + ratios[1]) / total)));
    return {b1, b2 - b1, count - b2};
}

/// Per-class shuffled partition of the labeled nodes into train/valid/test.
inline SplitAssignment stratified_split(const MultiRelationGraph& g, std::uint64_t seed,
                                        const std::array<double, 3>& ratios = {0.4, 0.2, 0.4}) {
    for (double r : ratios)
        if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
    if (!(ratios[0] + ratios[1] + ratios[2] > 0.0)) throw ConfigError("split ratios must not all be zero");

    SplitAssignment out;
    out.seed = seed;
    out.role.assign(g.n_nodes(), Split::none);
    std::mt19937_64 rng(seed);
    for (Label cls : {Label::fraud, Label::benign}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < g.n_nodes(); ++i)
            if (g.label(i) == cls) members.push_back(i);
        if (members.empty()) {
            throw ConfigError(std::string("stratified_split: no labeled ") +
                              (cls == Label::fraud ? "fraud" : "benign") + " nodes");
        }
        std::shuffle(members.begin(), members.end(), rng);
        const auto sizes = partition_sizes(members.size(), ratios);
        std::size_t k = 0;
        for (std::size_t part = 0; part < 3; ++part)
            for (std::size_t c = 0; c < sizes[part]; ++c) out.role[members[k++]] = static_cast<Split>(part);
    }
    return out;
}

} // namespace gcdnet::graph

#endif // GCDNET_GRAPHSTORE_SPLIT_HPP
