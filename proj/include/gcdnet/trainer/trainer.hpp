#ifndef GCDNET_TRAINER_TRAINER_HPP
#define GCDNET_TRAINER_TRAINER_HPP

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/evalkit/metrics.hpp"
#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/graphstore/split.hpp"
#include "gcdnet/numkernel/adam.hpp"
#include "gcdnet/numkernel/ops.hpp"
#include "gcdnet/protogcd/label_view.hpp"
#include "gcdnet/protogcd/protogcd.hpp"
#include "gcdnet/trainer/config.hpp"
#include "gcdnet/trainer/model.hpp"

namespace gcdnet::train {

/// Class weights for the weighted BCE: fraud = n_benign / n_fraud over the
/// training split, benign = 1. Both 1 when unweighted.
struct ClassWeights {
    double fraud = 1.0;
    double benign = 1.0;
};

inline ClassWeights class_weights(const proto::TrainLabelView& labels, bool weighted) {
    if (!weighted) return {};
    std::size_t n_fraud = 0, n_benign = 0;
    for (std::size_t i = 0; i < labels.n_nodes(); ++i) {
        if (!labels.is_train(i)) continue;
        const auto l = labels.label(i);
        if (l == graph::Label::fraud) ++n_fraud;
        else if (l == graph::Label::benign) ++n_benign;
    }
    if (n_fraud == 0 || n_benign == 0) throw ConfigError("training split must contain both classes");
    return {static_cast<double>(n_benign) / static_cast<double>(n_fraud), 1.0};
}

/// Weighted BCE over the labeled entries of a batch. Returns nullopt (and
/// the caller skips the batch) when no entry is labeled.
inline std::optional<Var> loss(Var probabilities, const std::vector<graph::Label>& labels, const ClassWeights& w) {
    if (labels.size() != probabilities.value().size()) {
        throw ShapeError("loss: " + std::to_string(probabilities.value().size()) + " probabilities for " +
                         std::to_string(labels.size()) + " labels");
    }
    std::vector<std::size_t> rows;
    std::vector<double> targets, weights;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == graph::Label::unlabeled) continue;
        rows.push_back(i);
        const bool fraud = labels[i] == graph::Label::fraud;
        targets.push_back(fraud ? 1.0 : 0.0);
        weights.push_back(fraud ? w.fraud : w.benign);
    }
    if (rows.empty()) return std::nullopt;
    Var p = rows.size() == labels.size() ? probabilities : num::gather_rows(probabilities, rows);
    return num::weighted_bce(p, std::move(targets), std::move(weights));
}

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;  ///< eval-mode loss over the training split after the epoch
    double batch_loss = 0.0;  ///< mean loss of the epoch's minibatches (0 at epoch 0)
    eval::MetricSet valid;
    double seconds = 0.0;     ///< wall clock; not part of the reproducible record
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;
    std::optional<double> best_valid_auc;
    eval::MetricSet test;
    std::size_t skipped_batches = 0;
};

/// Patience-based stopping on validation AUC. An absent AUC never improves
/// on a present one; the first observation always counts as an improvement.
class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {
        if (patience < 1) throw ConfigError("patience must be >= 1");
    }

    /// Returns true when `auc` is a new best.
    bool observe(std::size_t epoch, std::optional<double> auc) {
        const double v = auc.value_or(-std::numeric_limits<double>::infinity());
        if (!seen_ || v > best_) {
            seen_ = true;
            best_ = v;
            best_epoch_ = epoch;
            since_best_ = 0;
            return true;
        }
        ++since_best_;
        return false;
    }

    bool should_stop() const { return seen_ && since_best_ >= patience_; }
    std::size_t best_epoch() const { return best_epoch_; }

private:
    std::size_t patience_;
    bool seen_ = false;
    double best_ = 0.0;
    std::size_t best_epoch_ = 0;
    std::size_t since_best_ = 0;
};

/// Eval-mode outputs over the whole graph.
struct Inference {
    std::vector<double> probability;
    std::optional<proto::GcdVector> gcd;
    Tensor layer_input;
    std::optional<Tensor> x_exp;
    std::vector<layer::RelationAttention> attention;  ///< first layer, no GCD dropout
};

/// Binds a model to a graph and split and runs the training protocol.
///
/// Epoch order: prototype refresh on training nodes, GCD for all nodes,
/// then minibatches over training nodes (forward, loss, backward, Adam).
/// Every forward sees the full graph and the epoch's frozen GCD.
class Trainer {
public:
    Trainer(const graph::MultiRelationGraph& g, const graph::SplitAssignment& split, const ModelConfig& cfg)
        : graph_(&g), split_(&split), config_(cfg), labels_(g, split), model_(cfg, g.dim()),
          rng_(cfg.seed ^ 0x9e3779b97f4a7c15ULL) {
        if (split.role.size() != g.n_nodes()) throw ShapeError("split does not match the graph's node count");
        train_nodes_ = split.nodes(graph::Split::train);
        weights_ = class_weights(labels_, cfg.class_weighted);
        if (model_.uses_gcd()) prototypes_ = proto::init_prototypes(model_.project_values(g), labels_, cfg.tau);
    }

    GcdGnn& model() noexcept { return model_; }
    const GcdGnn& model() const noexcept { return model_; }
    const std::optional<proto::PrototypeState>& prototypes() const noexcept { return prototypes_; }
    const proto::TrainLabelView& labels() const noexcept { return labels_; }
    const ModelConfig& config() const noexcept { return config_; }
    const ClassWeights& weights() const noexcept { return weights_; }

    /// Number of times a GCD vector was computed.
    std::size_t gcd_evaluations() const noexcept { return gcd_evaluations_; }

    /// Replaces model and prototypes (checkpoint restore).
    void restore(GcdGnn model, std::optional<proto::PrototypeState> prototypes) {
        if (model.in_dim() != graph_->dim()) {
            throw ShapeError("model expects " + std::to_string(model.in_dim()) + " input features, graph has " +
                             std::to_string(graph_->dim()));
        }
        if (model.uses_gcd() != prototypes.has_value()) throw ContractError("restore: prototypes do not match the model");
        model_ = std::move(model);
        prototypes_ = std::move(prototypes);
    }

    Inference infer() {
        Inference out;
        if (model_.uses_gcd()) {
            out.x_exp = model_.project_values(*graph_);
            out.gcd = current_gcd(*out.x_exp);
        }
        Tape tape;
        auto fwd = model_.infer(tape, *graph_, out.gcd ? &*out.gcd : nullptr);
        out.probability = fwd.probability.value().storage();
        out.layer_input = fwd.layer_input.value();
        out.attention = std::move(fwd.first_layer_attention);
        return out;
    }

    /// Metrics over the labeled nodes of one split. Evaluation reads ground
    /// truth from the graph, outside the audited training view.
    eval::MetricSet evaluate(const Inference& inf, graph::Split s) const {
        std::vector<double> scores;
        std::vector<int> y;
        for (std::size_t i = 0; i < graph_->n_nodes(); ++i) {
            if (split_->role[i] != s) continue;
            const auto l = graph_->label(i);
            if (l == graph::Label::unlabeled) continue;
            scores.push_back(inf.probability[i]);
            y.push_back(l == graph::Label::fraud ? 1 : 0);
        }
        return eval::compute_metrics(scores, y, config_.thres);
    }

    eval::MetricSet evaluate(graph::Split s) { return evaluate(infer(), s); }

    /// Eval-mode loss over the training split.
    double training_loss(const Inference& inf) const {
        Tape tape;
        std::vector<double> p;
        std::vector<graph::Label> y;
        for (auto i : train_nodes_) {
            p.push_back(inf.probability[i]);
            y.push_back(labels_.label(i));
        }
        auto l = loss(tape.constant(Tensor::column(std::move(p))), y, weights_);
        return l ? l->value()[0] : 0.0;
    }

    EpochStats train_epoch() {
        const auto start = std::chrono::steady_clock::now();
        std::optional<proto::GcdVector> gcd;
        if (model_.uses_gcd()) {
            const Tensor x_exp = model_.project_values(*graph_);
            prototypes_ = proto::update_prototypes(*prototypes_, x_exp, labels_);
            gcd = current_gcd(x_exp);
        }
        std::vector<std::size_t> order = train_nodes_;
        std::shuffle(order.begin(), order.end(), rng_);
        const num::AdamOptions adam{config_.learning_rate, 0.9, 0.999, 1e-8, config_.weight_decay};
        auto params = model_.parameters();

        double loss_sum = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t b = 0; b < order.size(); b += config_.batch_size) {
            const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(b),
                                                 order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), b + config_.batch_size)));
            std::vector<graph::Label> y;
            y.reserve(batch.size());
            for (auto i : batch) y.push_back(labels_.label(i));

            Tape tape;
            auto fwd = model_.forward(tape, *graph_, gcd ? &*gcd : nullptr, true, &rng_);
            auto l = loss(num::gather_rows(fwd.probability, batch), y, weights_);
            if (!l) {
                ++skipped_batches_;
                continue;
            }
            tape.backward(*l);
            num::adam_step(params, adam);
            loss_sum += l->value()[0];
            ++n_batches;
        }
        ++epoch_;
        EpochStats stats;
        stats.epoch = epoch_;
        stats.batch_loss = n_batches == 0 ? 0.0 : loss_sum / static_cast<double>(n_batches);
        const auto inf = infer();
        stats.train_loss = training_loss(inf);
        stats.valid = evaluate(inf, graph::Split::valid);
        stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return stats;
    }

    /// Epoch-0 evaluation, up to max_epochs training epochs with early
    /// stopping on validation AUC, restore of the best epoch, one test pass.
    /// The untrained epoch-0 state is a candidate for the best epoch.
    TrainReport fit() {
        TrainReport report;
        {
            const auto start = std::chrono::steady_clock::now();
            EpochStats e0;
            const auto inf = infer();
            e0.epoch = epoch_;
            e0.train_loss = training_loss(inf);
            e0.valid = evaluate(inf, graph::Split::valid);
            e0.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            report.epochs.push_back(e0);
            report.best_epoch = e0.epoch;
            report.best_valid_auc = e0.valid.auc;
        }
        EarlyStopping stopper(config_.patience);
        stopper.observe(report.best_epoch, report.best_valid_auc);
        std::optional<GcdGnn> best_model = model_;
        std::optional<proto::PrototypeState> best_protos = prototypes_;
        for (std::size_t e = 0; e < config_.max_epochs; ++e) {
            auto stats = train_epoch();
            report.epochs.push_back(stats);
            if (stopper.observe(stats.epoch, stats.valid.auc)) {
                best_model = model_;
                best_protos = prototypes_;
                report.best_epoch = stats.epoch;
                report.best_valid_auc = stats.valid.auc;
            }
            if (stopper.should_stop()) break;
        }
        report.skipped_batches = skipped_batches_;
        if (best_model) {
            model_ = std::move(*best_model);
            prototypes_ = std::move(best_protos);
        }
        report.test = evaluate(graph::Split::test);
        return report;
    }

private:
    proto::GcdVector current_gcd(const Tensor& x_exp) {
        ++gcd_evaluations_;
        return proto::compute_gcd(*prototypes_, x_exp, labels_);
    }

    const graph::MultiRelationGraph* graph_;
    const graph::SplitAssignment* split_;
    ModelConfig config_;
    proto::TrainLabelView labels_;
    GcdGnn model_;
    std::optional<proto::PrototypeState> prototypes_;
    std::mt19937_64 rng_;
    std::vector<std::size_t> train_nodes_;
    ClassWeights weights_;
    std::size_t epoch_ = 0;
    std::size_t skipped_batches_ = 0;
    std::size_t gcd_evaluations_ = 0;
};

} // namespace gcdnet::train

#endif // GCDNET_TRAINER_TRAINER_HPP
