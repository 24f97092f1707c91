#ifndef GCDNET_TRAINER_MODEL_HPP
#define GCDNET_TRAINER_MODEL_HPP

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gcdnet/gcdlayer/layer.hpp"
#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/numkernel/ops.hpp"
#include "gcdnet/protogcd/protogcd.hpp"
#include "gcdnet/trainer/config.hpp"

namespace gcdnet::train {

using num::Parameter;
using num::Tape;
using num::Tensor;
using num::Var;

/// Everything a forward pass produced that callers may want to inspect.
struct ForwardResult {
    Var probability;  ///< [n x 1]
    Var embeddings;   ///< last layer output, before dropout
    Var layer_input;  ///< x_mixed, or x for the backbone
    std::optional<Var> x_exp;
    std::optional<Var> lambda;
    std::vector<layer::RelationAttention> first_layer_attention;
};

/// Projection, gate, GCD layers and classifier head, wired per ModelConfig.
class GcdGnn {
public:
    GcdGnn() = default;

    GcdGnn(const ModelConfig& cfg, std::size_t in_dim) : config_(cfg), in_dim_(in_dim) {
        cfg.validate();
        if (in_dim < 1) throw ConfigError("model input dimension must be >= 1");
        std::mt19937_64 rng(cfg.seed);
        const std::size_t h = cfg.hidden_dimension;
        if (cfg.uses_gcd()) {
            projection_.emplace(in_dim, h, rng);
            gate_.emplace(in_dim, h, rng);
        }
        for (std::size_t l = 0; l < cfg.n_layer; ++l) {
            layers_.emplace_back("layer" + std::to_string(l), cfg.layer_config(l == 0 ? in_dim : h), rng);
        }
        head_ = layer::ClassifierHead(h, h, rng);
    }

    const ModelConfig& config() const noexcept { return config_; }
    std::size_t in_dim() const noexcept { return in_dim_; }
    bool uses_gcd() const noexcept { return config_.uses_gcd(); }

    std::vector<Parameter*> parameters() {
        std::vector<Parameter*> out;
        if (projection_) projection_->collect(out);
        if (gate_) gate_->collect(out);
        for (auto& l : layers_) l.collect(out);
        head_.collect(out);
        return out;
    }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for (auto* p : parameters()) n += p->size();
        return n;
    }

    proto::Projection* projection() { return projection_ ? &*projection_ : nullptr; }
    proto::Gate* gate() { return gate_ ? &*gate_ : nullptr; }
    std::vector<layer::GcdLayer>& layers() { return layers_; }
    layer::ClassifierHead& head() { return head_; }

    /// x_exp values for the whole graph (no gradients kept).
    Tensor project_values(const graph::MultiRelationGraph& g) {
        if (!projection_) throw ContractError("project_values: backbone model has no projection");
        Tape tape;
        Var x = tape.constant(g.features());
        return proto::project_features(tape, x, *projection_).value();
    }

    /// Full-graph forward. `gcd` is required unless the model is the backbone.
    /// `rng` drives dropout and GCD dropout and may be null when not training.
    template <typename Rng>
    ForwardResult forward(Tape& tape, const graph::MultiRelationGraph& g, const proto::GcdVector* gcd, bool training,
                          Rng* rng) {
        if (g.dim() != in_dim_) {
            throw ShapeError("model expects " + std::to_string(in_dim_) + " input features, graph has " +
                             std::to_string(g.dim()));
        }
        if (uses_gcd() && gcd == nullptr) throw ContractError("forward: GCD vector required");
        if (training && rng == nullptr && (config_.dropout > 0.0 || config_.gcd_drop > 0.0)) {
            throw ContractError("forward: training with dropout needs a random source");
        }
        ForwardResult out;
        Var x = tape.constant(g.features());
        Var h = x;
        if (uses_gcd()) {
            Var x_exp = proto::project_features(tape, x, *projection_);
            auto mixed = proto::mix_features(tape, x, x_exp, *gate_);
            out.x_exp = x_exp;
            out.lambda = mixed.lambda;
            h = mixed.x_mixed;
        }
        out.layer_input = h;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            auto att = layer::build_attention(g, uses_gcd() ? gcd : nullptr, layers_[l].config, training, rng);
            h = layer::layer_forward(tape, h, att, layers_[l]);
            if (l == 0) out.first_layer_attention = std::move(att);
        }
        out.embeddings = h;
        if (training && config_.dropout > 0.0) {
            Tensor mask(h.value().shape());
            std::bernoulli_distribution keep(1.0 - config_.dropout);
            const double s = 1.0 / (1.0 - config_.dropout);
            for (double& m : mask.storage()) m = keep(*rng) ? s : 0.0;
            h = num::mul_const(h, mask);
        }
        out.probability = layer::classify(tape, h, head_);
        return out;
    }

    ForwardResult infer(Tape& tape, const graph::MultiRelationGraph& g, const proto::GcdVector* gcd) {
        return forward<std::mt19937_64>(tape, g, gcd, false, nullptr);
    }

private:
    ModelConfig config_;
    std::size_t in_dim_ = 0;
    std::optional<proto::Projection> projection_;
    std::optional<proto::Gate> gate_;
    std::vector<layer::GcdLayer> layers_;
    layer::ClassifierHead head_;
};

} // namespace gcdnet::train

#endif // GCDNET_TRAINER_MODEL_HPP
