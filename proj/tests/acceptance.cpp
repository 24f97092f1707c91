// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is non-zero when any criterion fails, except criteria 6 and 7,
// which are reported but not enforced (see README, "Acceptance").

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gcdnet/evalkit/diagnostics.hpp"
#include "gcdnet/evalkit/metrics.hpp"
#include "gcdnet/gcdlayer/layer.hpp"
#include "gcdnet/graphstore/split.hpp"
#include "gcdnet/graphstore/synth.hpp"
#include "gcdnet/protogcd/protogcd.hpp"
#include "gcdnet/trainer/report.hpp"
#include "gcdnet/trainer/trainer.hpp"
#include "support.hpp"

using namespace gcdnet;
using gcdnet::num::Tensor;
using gcdnet::num::Var;
using Clock = std::chrono::steady_clock;

namespace {

const std::set<int> kReportOnly{6, 7};

struct Outcome {
    int id;
    bool pass;
};
std::vector<Outcome> outcomes;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %d %-28s %s  %s\n", id, name.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    outcomes.push_back({id, pass});
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

double lrelu(double x) { return x > 0.0 ? x : 0.2 * x; }

// 1. Full-model gradients against central differences.
void gradient_fidelity() {
    const auto start = Clock::now();
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        const auto g = testkit::random_graph(12, 6, 2, 0.25, rng, 3);
        const auto split = graph::stratified_split(g, seed);
        train::ModelConfig cfg;
        cfg.hidden_dimension = 4;
        cfg.ablation = train::Ablation::m3;
        cfg.seed = seed;
        train::GcdGnn model(cfg, g.dim());
        proto::TrainLabelView view(g, split);
        const Tensor x_exp = model.project_values(g);
        const auto protos = proto::init_prototypes(x_exp, view, cfg.tau);
        const auto gcd = proto::compute_gcd(protos, x_exp, view);

        std::vector<Tensor*> leaves;
        for (auto* p : model.parameters()) leaves.push_back(&p->tensor);
        const std::vector<graph::Label> labels = g.labels();
        const auto check = testkit::check_gradients(leaves, [&](num::Tape& tape) {
            auto fwd = model.infer(tape, g, &gcd);
            return *train::loss(fwd.probability, labels, train::ClassWeights{2.0, 1.0});
        });
        worst = std::max(worst, check.max_rel_error);
        checked += check.checked;
    }
    const double secs = seconds_since(start);
    report(1, "gradient fidelity", worst < 1e-4 && secs < 30.0,
           fmt("max rel error %.3g", worst) + fmt(" over %.0f entries", static_cast<double>(checked)) +
               fmt(", %.1f s", secs));
}

// 2. Attention normalization, perspective negation and GCD range.
void attention_invariants() {
    double worst_sum = 0.0;
    bool negation = true, positive = true, in_range = true;
    for (std::uint64_t t = 0; t < 100; ++t) {
        std::mt19937_64 rng(1000 + t);
        const std::size_t n = 10 + t % 31;
        const auto g = testkit::random_graph(n, 4, 1 + t % 3, 0.15, rng, 3);
        const auto split = graph::stratified_split(g, t);
        train::ModelConfig cfg;
        cfg.hidden_dimension = 5;
        cfg.seed = t;
        cfg.gcd_drop = t % 2 ? 0.3 : 0.0;
        train::GcdGnn model(cfg, g.dim());
        proto::TrainLabelView view(g, split);
        const Tensor x_exp = model.project_values(g);
        const auto protos = proto::update_prototypes(proto::init_prototypes(x_exp, view, cfg.tau), x_exp, view);
        const auto gcd = proto::compute_gcd(protos, x_exp, view);
        for (double v : gcd.g) in_range = in_range && v >= -1.0 && v <= 1.0;

        const auto views = layer::perspective_split(gcd);
        for (std::size_t i = 0; i < n; ++i) negation = negation && views.atyp[i] == -views.typ[i];

        const auto lc = cfg.layer_config(g.dim());
        const auto att = layer::build_attention(g, &gcd, lc, t % 2 == 1, &rng);
        for (std::size_t r = 0; r < g.n_relations(); ++r) {
            for (const auto* a : {&att[r].typ, &*att[r].atyp}) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (g.degree(i, r) == 0) continue;
                    double s = 0.0;
                    for (std::size_t e = a->offsets[i]; e < a->offsets[i + 1]; ++e) {
                        positive = positive && a->values[e] > 0.0;
                        s += a->values[e];
                    }
                    worst_sum = std::max(worst_sum, std::abs(s - 1.0));
                }
            }
        }
    }
    report(2, "attention invariants", worst_sum <= 1e-9 && negation && positive && in_range,
           fmt("max |sum-1| %.3g", worst_sum) + ", negation " + (negation ? "exact" : "broken") + ", gcd range " +
               (in_range ? "ok" : "violated"));
}

// 3. Prototype weights, identical-class fixed point, large-temperature mean.
void prototype_properties() {
    double worst_sum = 0.0, worst_fixed = 0.0, worst_mean = 0.0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        std::mt19937_64 rng(2000 + t);
        const std::size_t n = 8 + t % 20, d = 3 + t % 4;
        std::vector<graph::Label> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = i % 3 == 0 ? graph::Label::fraud : graph::Label::benign;
        graph::MultiRelationGraph g(Tensor::matrix(n, 1), labels, {});
        graph::SplitAssignment split;
        split.role.assign(n, graph::Split::train);
        proto::TrainLabelView view(g, split);

        Tensor x = testkit::random_matrix(n, d, rng);
        const auto fraud = split.nodes(graph::Split::train);
        std::vector<std::size_t> members;
        for (auto i : fraud)
            if (labels[i] == graph::Label::fraud) members.push_back(i);
        const auto w = proto::prototype_weights(x, members, x.row(members[0]), 0.1);
        double s = 0.0;
        for (double v : w) s += v;
        worst_sum = std::max(worst_sum, std::abs(s - 1.0));

        // fraud rows identical: the fraud prototype stays put
        const auto row = testkit::random_matrix(1, d, rng);
        for (auto i : members)
            for (std::size_t j = 0; j < d; ++j) x(i, j) = row(0, j);
        auto state = proto::init_prototypes(x, view, 0.1);
        for (int k = 0; k < 25; ++k) state = proto::update_prototypes(state, x, view);
        for (std::size_t j = 0; j < d; ++j) worst_fixed = std::max(worst_fixed, std::abs(state.mu_fr[j] - row(0, j)));

        // huge temperature: one update from a random prototype gives the class mean
        Tensor y = testkit::random_matrix(n, d, rng);
        auto hot = proto::init_prototypes(y, view, 1e6);
        hot.mu_be = testkit::random_matrix(1, d, rng).storage();
        const auto next = proto::update_prototypes(hot, y, view);
        std::vector<double> mean(d, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] != graph::Label::benign) continue;
            for (std::size_t j = 0; j < d; ++j) mean[j] += y(i, j);
            ++count;
        }
        for (std::size_t j = 0; j < d; ++j)
            worst_mean = std::max(worst_mean, std::abs(next.mu_be[j] - mean[j] / static_cast<double>(count)));
    }
    report(3, "prototype properties", worst_sum <= 1e-9 && worst_fixed <= 1e-12 && worst_mean <= 1e-6,
           fmt("weights %.3g", worst_sum) + fmt(", fixed point %.3g", worst_fixed) + fmt(", tau=1e6 %.3g", worst_mean));
}

// 4. Metric implementations against direct oracles.
void metric_oracles() {
    double worst_auc = 0.0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        std::mt19937_64 rng(3000 + t);
        const std::size_t n = 2 + rng() % 80;
        std::vector<double> s(n);
        std::vector<int> y(n);
        const int levels = 2 + static_cast<int>(rng() % 8);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % levels) / levels;
            y[i] = static_cast<int>(rng() % 2);
        }
        y[0] = 1;
        y[1] = 0;
        double wins = 0.0, pairs = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (y[i] == 1 && y[j] == 0) {
                    pairs += 1.0;
                    wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
                }
        worst_auc = std::max(worst_auc, std::abs(*eval::auc(s, y) - wins / pairs));
    }
    bool exact = true;
    for (std::uint64_t t = 0; t < 50; ++t) {
        std::mt19937_64 rng(4000 + t);
        const std::size_t n = 1 + rng() % 60;
        std::vector<int> p(n), y(n);
        double tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = static_cast<int>(rng() % 2);
            y[i] = static_cast<int>(rng() % 2);
            (p[i] ? (y[i] ? tp : fp) : (y[i] ? fn : tn)) += 1;
        }
        auto ratio = [](double a, double b) { return b == 0.0 ? 0.0 : a / b; };
        const double f1 = 0.5 * (ratio(2 * tp, 2 * tp + fp + fn) + ratio(2 * tn, 2 * tn + fn + fp));
        const double gm = std::sqrt(ratio(tp, tp + fn) * ratio(tn, tn + fp));
        exact = exact && eval::f1_macro(p, y) == f1 && eval::g_mean(p, y) == gm;
    }
    report(4, "metric oracles", worst_auc <= 1e-12 && exact,
           fmt("auc max diff %.3g", worst_auc) + ", f1/g-mean " + (exact ? "exact" : "mismatch"));
}

graph::SynthParams acceptance_graph(std::uint64_t seed) {
    graph::SynthParams p;
    p.n_nodes = 2000;
    p.dim = 10;
    p.n_relations = 2;
    p.fraud_ratio = 0.15;
    p.homophily = 0.6;
    p.camouflage_rate = 0.4;
    p.camouflage_strength = 0.7;
    p.seed = seed;
    return p;
}

struct SeedModels {
    graph::MultiRelationGraph graph;
    graph::SplitAssignment split;
    std::optional<train::Trainer> m3;
    double m3_auc = 0.0, m1_auc = 0.0, backbone_auc = 0.0;
    double m3_seconds = 0.0;
    bool leak_free = true;
};

double fit_variant(SeedModels& s, train::Ablation a, std::uint64_t seed, std::optional<train::Trainer>* keep,
                   double* secs) {
    train::ModelConfig cfg;
    cfg.ablation = a;
    cfg.seed = seed;
    cfg.max_epochs = 100;
    const auto start = Clock::now();
    std::optional<train::Trainer> t;
    t.emplace(s.graph, s.split, cfg);
    const auto r = t->fit();
    if (secs) *secs = seconds_since(start);
    s.leak_free = s.leak_free && t->labels().reads(graph::Split::valid) == 0 && t->labels().reads(graph::Split::test) == 0;
    std::printf("  seed %llu %-8s test auc %.4f  best epoch %zu of %zu\n", static_cast<unsigned long long>(seed),
                train::ablation_name(a), r.test.auc.value_or(0.0), r.best_epoch, r.epochs.back().epoch);
    std::fflush(stdout);
    if (keep) *keep = std::move(t);
    return r.test.auc.value_or(0.0);
}

// 7 (hand part). Unrolled distance oracle on fixed cases.
double distance_hand_cases() {
    double worst = 0.0;
    const std::vector<std::vector<double>> gcds{{0.1, 0.8, -0.5, 0.3, -0.9}, {0.0, -0.2, -0.4, 0.6, 0.95}};
    Tensor x = Tensor::from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}, {-3.0, 0.0}, {1.0, 1.0}});
    graph::MultiRelationGraph g(x, std::vector<graph::Label>(5, graph::Label::benign),
                                {{{0, 1}, {0, 2}}, {{0, 3}, {0, 4}, {1, 2}}});
    for (const auto& gcd : gcds) {
        layer::LayerConfig lc;
        proto::GcdVector gv{gcd};
        const auto att = layer::build_attention<std::mt19937_64>(g, &gv, lc, false, nullptr);
        for (std::size_t i = 0; i < 5; ++i) {
            double tn = 0, td = 0, an = 0, ad = 0;
            for (std::size_t r = 0; r < 2; ++r) {
                const auto nb = g.neighbors(i, r);
                double zt = 0, za = 0;
                for (auto j : nb) {
                    zt += std::exp(lrelu(gcd[j]));
                    za += std::exp(lrelu(-gcd[j]));
                }
                for (auto j : nb) {
                    const double dist = std::hypot(x(j, 0) - x(i, 0), x(j, 1) - x(i, 1));
                    const double wt = std::exp(lrelu(gcd[j])) / zt, wa = std::exp(lrelu(-gcd[j])) / za;
                    tn += wt * dist;
                    td += wt;
                    an += wa * dist;
                    ad += wa;
                }
            }
            const auto nd = eval::node_distances(i, x, att);
            worst = std::max({worst, std::abs(nd.d_typ - tn / td), std::abs(nd.d_atyp - an / ad)});
        }
    }
    return worst;
}

// 8. Bitwise-identical reports at thread count 1.
bool deterministic_reports() {
    graph::SynthParams p = acceptance_graph(42);
    p.n_nodes = 400;
    const auto g = graph::generate_synthetic(p);
    const auto split = graph::stratified_split(g, 42);
    train::ModelConfig cfg;
    cfg.max_epochs = 5;
    cfg.gcd_drop = 0.2;
    cfg.seed = 42;
    train::Trainer a(g, split, cfg), b(g, split, cfg);
    const auto ra = train::report_string(a.fit());
    const auto rb = train::report_string(b.fit());
    return ra == rb && a.labels().reads(graph::Split::valid) == 0 && a.labels().reads(graph::Split::test) == 0;
}

} // namespace

int main() {
    gradient_fidelity();
    attention_invariants();
    prototype_properties();
    metric_oracles();

    std::vector<SeedModels> runs;
    runs.reserve(5);
    double max_m3_secs = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto g = graph::generate_synthetic(acceptance_graph(seed));
        auto split = graph::stratified_split(g, seed);
        runs.push_back(SeedModels{std::move(g), std::move(split), std::nullopt});
        auto& s = runs.back();
        s.m3_auc = fit_variant(s, train::Ablation::m3, seed, &s.m3, &s.m3_seconds);
        s.m1_auc = fit_variant(s, train::Ablation::m1, seed, nullptr, nullptr);
        s.backbone_auc = fit_variant(s, train::Ablation::backbone, seed, nullptr, nullptr);
        max_m3_secs = std::max(max_m3_secs, s.m3_seconds);
    }
    std::vector<double> m3, m1, bb;
    bool leak_free = true;
    for (const auto& s : runs) {
        m3.push_back(s.m3_auc);
        m1.push_back(s.m1_auc);
        bb.push_back(s.backbone_auc);
        leak_free = leak_free && s.leak_free;
    }
    const double med_m3 = median(m3), med_m1 = median(m1), med_bb = median(bb);
    report(5, "end-to-end learning", med_m3 >= 0.90 && max_m3_secs < 300.0,
           fmt("median M3 test auc %.4f", med_m3) + fmt(", slowest seed %.1f s", max_m3_secs));
    report(6, "ablation ordering", med_bb + 0.02 <= med_m1 && med_m3 >= med_m1 - 0.01,
           fmt("backbone %.4f", med_bb) + fmt(", M1 %.4f", med_m1) + fmt(", M3 %.4f", med_m3));

    int larger = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto& s = runs[seed];
        const auto inf = s.m3->infer();
        layer::LayerConfig lc = s.m3->config().layer_config(s.graph.dim());
        const auto att = layer::build_attention<std::mt19937_64>(s.graph, &*inf.gcd, lc, false, nullptr);
        const auto d = eval::gcd_weighted_distances(s.graph, inf.layer_input, att, inf.gcd->g, 20, seed);
        std::printf("  seed %llu mean d_typ %.4f  mean d_atyp %.4f\n", static_cast<unsigned long long>(seed),
                    d.mean_typ(), d.mean_atyp());
        larger += d.mean_atyp() >= d.mean_typ();
    }
    const double hand = distance_hand_cases();
    report(7, "distance analysis", larger >= 4 && hand <= 1e-12,
           fmt("d_atyp >= d_typ in %.0f/5 seeds", larger) + fmt(", hand oracle %.3g", hand));

    const bool det = deterministic_reports();
    report(8, "determinism and leakage", det && leak_free,
           std::string("reports ") + (det ? "identical" : "differ") + ", valid/test label reads " +
               (leak_free ? "0" : "non-zero"));

    int enforced_failures = 0;
    for (const auto& o : outcomes)
        if (!o.pass && !kReportOnly.count(o.id)) ++enforced_failures;
    return enforced_failures == 0 ? 0 : 1;
}
