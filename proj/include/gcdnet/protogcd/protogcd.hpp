#ifndef GCDNET_PROTOGCD_PROTOGCD_HPP
#define GCDNET_PROTOGCD_PROTOGCD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/numkernel/linear.hpp"
#include "gcdnet/numkernel/ops.hpp"
#include "gcdnet/protogcd/label_view.hpp"

namespace gcdnet::proto {

using num::Parameter;
using num::Tape;
using num::Tensor;
using num::Var;

/// Phi_proj followed by GraphNorm: x_exp = GraphNorm(Phi(X)), d -> d.
struct Projection {
    num::Mlp phi;
    Parameter gamma;
    Parameter beta;
    Parameter alpha;
    double eps = 1e-5;

    Projection() = default;

    template <typename Rng>
    Projection(std::size_t dim, std::size_t hidden, Rng& rng)
        : phi("proj", dim, hidden, dim, rng),
          gamma("proj.norm.gamma", Tensor({1, dim}, 1.0)),
          beta("proj.norm.beta", Tensor({1, dim}, 0.0)),
          alpha("proj.norm.alpha", Tensor({1, dim}, 1.0)) {}

    std::size_t dim() const { return gamma.tensor.size(); }

    void collect(std::vector<Parameter*>& out) {
        phi.collect(out);
        out.push_back(&gamma);
        out.push_back(&beta);
        out.push_back(&alpha);
    }
};

inline Var project_features(Tape& tape, Var x, Projection& proj) {
    if (x.value().cols() != proj.phi.first.in_dim()) {
        throw ShapeError("project_features: input " + num::shape_string(x.value().shape()) + " but projection expects " +
                         std::to_string(proj.phi.first.in_dim()) + " columns");
    }
    Var h = proj.phi(tape, x);
    return num::graph_norm(h, tape.param(proj.gamma), tape.param(proj.beta), tape.param(proj.alpha), proj.eps);
}

/// a.b / (|a||b|), or 0 when either norm is below 1e-12.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ShapeError("cosine_similarity: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

struct PrototypeState {
    std::vector<double> mu_fr;
    std::vector<double> mu_be;
    double tau = 0.1;
    std::size_t epoch = 0;

    const std::vector<double>& of(graph::Label cls) const { return cls == graph::Label::fraud ? mu_fr : mu_be; }
};

namespace detail {

inline std::vector<double> mean_rows(const Tensor& x, const std::vector<std::size_t>& rows) {
    std::vector<double> mu(x.cols(), 0.0);
    for (auto i : rows)
        for (std::size_t j = 0; j < x.cols(); ++j) mu[j] += x(i, j);
    for (double& v : mu) v /= static_cast<double>(rows.size());
    return mu;
}

inline std::vector<std::size_t> class_members(const TrainLabelView& labels, graph::Label cls) {
    auto members = labels.train_members(cls);
    if (members.empty()) {
        throw ConfigError(std::string("no training nodes labeled ") + (cls == graph::Label::fraud ? "fraud" : "benign"));
    }
    return members;
}

} // namespace detail

/// Per-class mean of x_exp over training nodes.
inline PrototypeState init_prototypes(const Tensor& x_exp, const TrainLabelView& labels, double tau = 0.1) {
    if (!(tau > 0.0)) throw ConfigError("prototype temperature must be positive");
    PrototypeState s;
    s.tau = tau;
    s.mu_fr = detail::mean_rows(x_exp, detail::class_members(labels, graph::Label::fraud));
    s.mu_be = detail::mean_rows(x_exp, detail::class_members(labels, graph::Label::benign));
    return s;
}

/// Softmax over members of cos(x_v, previous) / tau.
inline std::vector<double> prototype_weights(const Tensor& x_exp, const std::vector<std::size_t>& members,
                                             std::span<const double> previous, double tau) {
    if (!(tau > 0.0)) throw ConfigError("prototype temperature must be positive");
    std::vector<double> logits(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) logits[k] = cosine_similarity(x_exp.row(members[k]), previous) / tau;
    std::vector<std::size_t> one_segment(members.size(), 0);
    return num::segment_softmax(logits, one_segment, 1);
}

/// One iteration of the similarity-weighted prototype refinement per class,
/// restricted to training nodes.
inline PrototypeState update_prototypes(const PrototypeState& state, const Tensor& x_exp, const TrainLabelView& labels) {
    if (!(state.tau > 0.0)) throw ConfigError("prototype temperature must be positive");
    PrototypeState next = state;
    for (graph::Label cls : {graph::Label::fraud, graph::Label::benign}) {
        const auto members = detail::class_members(labels, cls);
        const auto& prev = state.of(cls);
        if (prev.size() != x_exp.cols()) {
            throw ShapeError("update_prototypes: prototype has " + std::to_string(prev.size()) + " entries, features " +
                             std::to_string(x_exp.cols()));
        }
        const auto w = prototype_weights(x_exp, members, prev, state.tau);
        std::vector<double> mu(x_exp.cols(), 0.0);
        for (std::size_t k = 0; k < members.size(); ++k)
            for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += w[k] * x_exp(members[k], j);
        (cls == graph::Label::fraud ? next.mu_fr : next.mu_be) = std::move(mu);
    }
    ++next.epoch;
    return next;
}

/// Per-node Global Confidence Degree.
struct GcdVector {
    std::vector<double> g;

    std::size_t size() const noexcept { return g.size(); }
    double operator[](std::size_t i) const { return g[i]; }
};

/// Training nodes compare against their own class prototype; every other
/// node (validation, test, unlabeled) takes the larger of the two similarities.
inline GcdVector compute_gcd(const PrototypeState& state, const Tensor& x_exp, const TrainLabelView& labels) {
    GcdVector out;
    out.g.resize(x_exp.rows());
    for (std::size_t i = 0; i < x_exp.rows(); ++i) {
        const auto xi = x_exp.row(i);
        graph::Label cls = graph::Label::unlabeled;
        if (labels.is_train(i)) cls = labels.label(i);
        if (cls == graph::Label::fraud || cls == graph::Label::benign) {
            out.g[i] = cosine_similarity(state.of(cls), xi);
        } else {
            out.g[i] = std::max(cosine_similarity(state.mu_fr, xi), cosine_similarity(state.mu_be, xi));
        }
    }
    return out;
}

/// Phi_gate: d -> hidden -> 1.
struct Gate {
    num::Mlp phi;

    Gate() = default;

    template <typename Rng>
    Gate(std::size_t dim, std::size_t hidden, Rng& rng) : phi("gate", dim, hidden, 1, rng) {}

    void collect(std::vector<Parameter*>& out) { phi.collect(out); }
};

struct MixedFeatures {
    Var x_exp;
    Var lambda;   ///< [n x 1], sigmoid of the gate output
    Var x_mixed;  ///< lambda * x_exp + (1 - lambda) * x
};

inline MixedFeatures mix_features(Tape& tape, Var x, Var x_exp, Gate& gate) {
    Var lambda = num::sigmoid(gate.phi(tape, x));
    return {x_exp, lambda, num::lerp_rows(lambda, x_exp, x)};
}

} // namespace gcdnet::proto

#endif // GCDNET_PROTOGCD_PROTOGCD_HPP
