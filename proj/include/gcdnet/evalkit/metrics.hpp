#ifndef GCDNET_EVALKIT_METRICS_HPP
#define GCDNET_EVALKIT_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "gcdnet/errors.hpp"

namespace gcdnet::eval {

/// Rank-based ROC AUC (Mann-Whitney U), ties counted one half.
/// Absent when either class is missing.
inline std::optional<double> auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ShapeError("auc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int y : labels) pos += (y == 1);
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) return std::nullopt;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Sum of 1-based average ranks of the positives.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] == 1) rank_sum += avg_rank;
        i = j + 1;
    }
    const double p = static_cast<double>(pos), q = static_cast<double>(neg);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline Confusion confusion(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw ShapeError("confusion: predictions and labels differ in length");
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predicted[i] == 1, t = truth[i] == 1;
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

namespace detail {
inline double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
} // namespace detail

/// Mean of the fraud-class and benign-class F1; an empty denominator scores 0.
inline double f1_macro(std::span<const int> predicted, std::span<const int> truth) {
    const auto c = confusion(predicted, truth);
    const double f1_fraud = detail::ratio(2.0 * c.tp, 2.0 * c.tp + c.fp + c.fn);
    const double f1_benign = detail::ratio(2.0 * c.tn, 2.0 * c.tn + c.fn + c.fp);
    return 0.5 * (f1_fraud + f1_benign);
}

/// sqrt(TPR * TNR); an empty denominator gives a rate of 0.
inline double g_mean(std::span<const int> predicted, std::span<const int> truth) {
    const auto c = confusion(predicted, truth);
    const double tpr = detail::ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    const double tnr = detail::ratio(static_cast<double>(c.tn), static_cast<double>(c.tn + c.fp));
    return std::sqrt(tpr * tnr);
}

struct MetricSet {
    std::optional<double> auc;
    double f1_macro = 0.0;
    double g_mean = 0.0;
    std::size_t support_fraud = 0;
    std::size_t support_benign = 0;
};

inline std::vector<int> threshold(std::span<const double> scores, double thres) {
    std::vector<int> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= thres ? 1 : 0;
    return out;
}

inline MetricSet compute_metrics(std::span<const double> scores, std::span<const int> labels, double thres = 0.5) {
    MetricSet m;
    const auto pred = threshold(scores, thres);
    m.auc = auc(scores, labels);
    m.f1_macro = f1_macro(pred, labels);
    m.g_mean = g_mean(pred, labels);
    for (int y : labels) (y == 1 ? m.support_fraud : m.support_benign) += 1;
    return m;
}

} // namespace gcdnet::eval

#endif // GCDNET_EVALKIT_METRICS_HPP
