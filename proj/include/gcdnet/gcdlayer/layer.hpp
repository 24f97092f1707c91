#ifndef GCDNET_GCDLAYER_LAYER_HPP
#define GCDNET_GCDLAYER_LAYER_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/gcdlayer/attention.hpp"
#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/numkernel/linear.hpp"
#include "gcdnet/numkernel/ops.hpp"
#include "gcdnet/protogcd/protogcd.hpp"

namespace gcdnet::layer {

using num::Parameter;
using num::Tape;
using num::Tensor;
using num::Var;

struct LayerConfig {
    std::size_t in_dim = 1;
    std::size_t out_dim = 1;
    double gcd_drop = 0.0;
    bool use_self_matrix = true;
    bool use_atypical = true;
    /// false: plain mean aggregation (GraphSAGE backbone), GCD unused.
    bool use_gcd = true;
    std::size_t n_layers = 1;
    double slope = 0.2;

    void validate() const {
        if (in_dim < 1 || out_dim < 1) throw ConfigError("layer dimensions must be >= 1");
        if (!(gcd_drop >= 0.0 && gcd_drop < 1.0)) throw ConfigError("gcd_drop must lie in [0, 1)");
        if (n_layers < 1) throw ConfigError("n_layers must be >= 1");
    }
};

/// Per-node matrix generator Psi: R^d -> R^{d x d'}, one linear map to d*d'
/// values read row-major.
struct SelfMatrixGenerator {
    num::Linear map;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;

    SelfMatrixGenerator() = default;

    template <typename Rng>
    SelfMatrixGenerator(const std::string& name, std::size_t d, std::size_t d_out, Rng& rng)
        : map(name, d, d * d_out, rng), in_dim(d), out_dim(d_out) {}

    void collect(std::vector<Parameter*>& out) { map.collect(out); }
};

/// Flat [n x (d*d')] matrices; row i is W_i in row-major order.
inline Var self_matrices(Tape& tape, Var x, SelfMatrixGenerator& gen) { return gen.map(tape, x); }

/// The message transform of one perspective: generated per node, or shared.
struct PerspectiveTransform {
    std::optional<SelfMatrixGenerator> generator;
    std::optional<Parameter> shared;

    template <typename Rng>
    static PerspectiveTransform make(const std::string& name, bool per_node, std::size_t d, std::size_t d_out, Rng& rng) {
        PerspectiveTransform t;
        if (per_node) t.generator.emplace(name + ".psi", d, d_out, rng);
        else t.shared.emplace(num::init_parameter(name + ".shared", {d, d_out}, d, rng));
        return t;
    }

    void collect(std::vector<Parameter*>& out) {
        if (generator) generator->collect(out);
        if (shared) out.push_back(&*shared);
    }
};

/// W_i applied to an aggregated neighbor vector; `matrices` is the
/// self_matrices() output when the transform is per node.
inline Var apply_transform(Tape& tape, Var aggregated, PerspectiveTransform& t, const std::optional<Var>& matrices) {
    if (t.generator) return num::row_vecmat(aggregated, *matrices, t.generator->out_dim);
    return num::matmul(aggregated, tape.param(*t.shared));
}

/// Attention for one relation, both perspectives (atyp empty when unused).
struct RelationAttention {
    EdgeAttention typ;
    std::optional<EdgeAttention> atyp;
};

/// m_i = W_i^typ sum_j a_ij^typ x_j + W_i^atyp sum_j a_ij^atyp x_j for one relation.
inline Var aggregate_messages(Tape& tape, Var x_in, const RelationAttention& att, PerspectiveTransform& typ,
                              const std::optional<Var>& typ_matrices, PerspectiveTransform* atyp,
                              const std::optional<Var>& atyp_matrices) {
    Var m = apply_transform(tape, num::spmm(att.typ, x_in), typ, typ_matrices);
    if (atyp != nullptr && att.atyp) {
        m = num::add(m, apply_transform(tape, num::spmm(*att.atyp, x_in), *atyp, atyp_matrices));
    }
    return m;
}

/// One GCD-GNN layer: h_i = LeakyReLU([U x_i | sum_r m_i^r] C + c).
struct GcdLayer {
    LayerConfig config;
    num::Linear self_path;  // U, d -> d'
    num::Linear combiner;   // C, 2d' -> d'
    PerspectiveTransform typ;
    std::optional<PerspectiveTransform> atyp;

    GcdLayer() = default;

    template <typename Rng>
    GcdLayer(const std::string& name, const LayerConfig& cfg, Rng& rng)
        : config(cfg),
          self_path(name + ".self", cfg.in_dim, cfg.out_dim, rng),
          combiner(name + ".combine", 2 * cfg.out_dim, cfg.out_dim, rng),
          typ(PerspectiveTransform::make(name + ".typ", cfg.use_gcd && cfg.use_self_matrix, cfg.in_dim, cfg.out_dim, rng)) {
        cfg.validate();
        if (cfg.use_gcd && cfg.use_atypical) {
            atyp = PerspectiveTransform::make(name + ".atyp", cfg.use_self_matrix, cfg.in_dim, cfg.out_dim, rng);
        }
    }

    void collect(std::vector<Parameter*>& out) {
        self_path.collect(out);
        combiner.collect(out);
        typ.collect(out);
        if (atyp) atyp->collect(out);
    }
};

/// Builds per-relation attention. Without a GCD vector (backbone) every
/// relation uses mean weights.
template <typename Rng>
std::vector<RelationAttention> build_attention(const graph::MultiRelationGraph& g, const proto::GcdVector* gcd,
                                               const LayerConfig& cfg, bool training, Rng* rng) {
    std::vector<RelationAttention> out;
    out.reserve(g.n_relations());
    if (!cfg.use_gcd || gcd == nullptr) {
        for (std::size_t r = 0; r < g.n_relations(); ++r) out.push_back({uniform_attention(g.relation(r)), std::nullopt});
        return out;
    }
    const auto views = perspective_split(*gcd);
    const AttentionOptions opt{cfg.slope, cfg.gcd_drop, training};
    for (std::size_t r = 0; r < g.n_relations(); ++r) {
        RelationAttention ra{gcd_attention(std::span<const double>(views.typ), g.relation(r), opt, rng), std::nullopt};
        if (cfg.use_atypical) ra.atyp = gcd_attention(std::span<const double>(views.atyp), g.relation(r), opt, rng);
        out.push_back(std::move(ra));
    }
    return out;
}

/// Layer forward over the whole graph with precomputed attention.
inline Var layer_forward(Tape& tape, Var x_in, const std::vector<RelationAttention>& attention, GcdLayer& layer) {
    const auto& cfg = layer.config;
    if (x_in.value().cols() != cfg.in_dim) {
        throw ShapeError("layer_forward: input " + num::shape_string(x_in.value().shape()) + " but layer expects " +
                         std::to_string(cfg.in_dim) + " columns");
    }
    std::optional<Var> typ_m, atyp_m;
    if (layer.typ.generator) typ_m = self_matrices(tape, x_in, *layer.typ.generator);
    if (layer.atyp && layer.atyp->generator) atyp_m = self_matrices(tape, x_in, *layer.atyp->generator);

    std::optional<Var> messages;
    for (const auto& ra : attention) {
        Var m = aggregate_messages(tape, x_in, ra, layer.typ, typ_m, layer.atyp ? &*layer.atyp : nullptr, atyp_m);
        messages = messages ? num::add(*messages, m) : m;
    }
    if (!messages) messages = tape.constant(Tensor::matrix(x_in.value().rows(), cfg.out_dim));
    Var self = layer.self_path(tape, x_in);
    return num::leaky_relu(layer.combiner(tape, num::concat_cols(self, *messages)), cfg.slope);
}

/// Classifier head: d' -> hidden -> 1, sigmoid output.
struct ClassifierHead {
    num::Mlp mlp;

    ClassifierHead() = default;

    template <typename Rng>
    ClassifierHead(std::size_t in, std::size_t hidden, Rng& rng) : mlp("head", in, hidden, 1, rng) {}

    void collect(std::vector<Parameter*>& out) { mlp.collect(out); }
};

/// Per-node fraud probability [n x 1].
inline Var classify(Tape& tape, Var embeddings, ClassifierHead& head) { return num::sigmoid(head.mlp(tape, embeddings)); }

inline int predict_label(double probability, double thres = 0.5) { return probability >= thres ? 1 : 0; }

} // namespace gcdnet::layer

#endif // GCDNET_GCDLAYER_LAYER_HPP
