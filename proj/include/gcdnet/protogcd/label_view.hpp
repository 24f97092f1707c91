#ifndef GCDNET_PROTOGCD_LABEL_VIEW_HPP
#define GCDNET_PROTOGCD_LABEL_VIEW_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/graphstore/split.hpp"

namespace gcdnet::proto {

/// Label access for the training path. Every call to label() is counted
/// against the split of the node read, so callers can prove that no
/// validation or test label reached prototype updates, GCD or the loss.
class TrainLabelView {
public:
    TrainLabelView(const graph::MultiRelationGraph& g, const graph::SplitAssignment& split)
        : labels_(&g.labels()), split_(&split.role) {}

    std::size_t n_nodes() const noexcept { return labels_->size(); }

    graph::Split split_of(std::size_t node) const { return (*split_)[node]; }
    bool is_train(std::size_t node) const { return (*split_)[node] == graph::Split::train; }

    graph::Label label(std::size_t node) const {
        ++reads_[static_cast<std::size_t>((*split_)[node])];
        return (*labels_)[node];
    }

    /// Training nodes of class `cls`, ascending.
    std::vector<std::size_t> train_members(graph::Label cls) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n_nodes(); ++i)
            if (is_train(i) && label(i) == cls) out.push_back(i);
        return out;
    }

    std::size_t reads(graph::Split s) const { return reads_[static_cast<std::size_t>(s)]; }
    void reset_counts() noexcept { reads_.fill(0); }

private:
    const std::vector<graph::Label>* labels_;
    const std::vector<graph::Split>* split_;
    mutable std::array<std::size_t, 4> reads_{};
};

} // namespace gcdnet::proto

#endif // GCDNET_PROTOGCD_LABEL_VIEW_HPP
