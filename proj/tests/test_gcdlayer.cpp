#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gcdnet/gcdlayer/attention.hpp"
#include "gcdnet/gcdlayer/layer.hpp"
#include "support.hpp"

using namespace gcdnet;
using gcdnet::num::Tensor;
using gcdnet::num::Var;

namespace {

graph::Csr csr_of(std::size_t n, const std::vector<graph::Edge>& edges) {
    graph::MultiRelationGraph g(Tensor::matrix(n, 1), std::vector<graph::Label>(n, graph::Label::benign), {edges});
    return g.relation(0);
}

double weight_of(const layer::EdgeAttention& a, std::size_t i, std::size_t j) {
    for (std::size_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e)
        if (a.cols[e] == j) return a.values[e];
    return 0.0;
}

double lrelu(double x) { return x > 0.0 ? x : 0.2 * x; }

} // namespace

TEST(PerspectiveSplit, NegatesExactly) {
    proto::GcdVector g{{0.7, 0.0, -0.3, 1.0}};
    const auto p = layer::perspective_split(g);
    EXPECT_EQ(p.typ[0], 0.7);
    EXPECT_EQ(p.atyp[0], -0.7);
    EXPECT_EQ(p.atyp[1], 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(p.typ[i] + p.atyp[i], 0.0);
}

TEST(Attention, TwoNeighborExample) {
    // node 0 with neighbors 1 (g=1) and 2 (g=-1)
    const auto csr = csr_of(3, {{0, 1}, {0, 2}});
    std::vector<double> g{0.0, 1.0, -1.0};
    const auto a = layer::gcd_attention(g, csr);
    const double e1 = std::exp(1.0), e2 = std::exp(-0.2);
    EXPECT_NEAR(weight_of(a, 0, 1), e1 / (e1 + e2), 1e-15);
    EXPECT_NEAR(weight_of(a, 0, 1), 0.7685, 5e-5);
    EXPECT_NEAR(weight_of(a, 0, 2), 0.2315, 5e-5);

    std::vector<double> neg{0.0, -1.0, 1.0};
    const auto b = layer::gcd_attention(neg, csr);
    EXPECT_NEAR(weight_of(b, 0, 1), 0.2315, 5e-5);
    EXPECT_NEAR(weight_of(b, 0, 2), 0.7685, 5e-5);
}

TEST(Attention, EqualGcdIsUniform) {
    const auto csr = csr_of(4, {{0, 1}, {0, 2}, {0, 3}});
    std::vector<double> g{0.1, 0.4, 0.4, 0.4};
    const auto a = layer::gcd_attention(g, csr);
    for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(weight_of(a, 0, j), 1.0 / 3.0, 1e-15);
}

TEST(Attention, SwappingNeighborGcdSwapsWeights) {
    const auto csr = csr_of(3, {{0, 1}, {0, 2}});
    std::vector<double> g{0.0, 0.3, -0.8};
    std::vector<double> s{0.0, -0.8, 0.3};
    const auto a = layer::gcd_attention(g, csr);
    const auto b = layer::gcd_attention(s, csr);
    EXPECT_EQ(weight_of(a, 0, 1), weight_of(b, 0, 2));
    EXPECT_EQ(weight_of(a, 0, 2), weight_of(b, 0, 1));
}

TEST(Attention, PositiveShiftLeavesTypicalWeights) {
    const auto csr = csr_of(4, {{0, 1}, {0, 2}, {0, 3}});
    std::vector<double> g{0.0, 0.1, 0.5, 0.2};
    std::vector<double> h{0.0, 0.4, 0.8, 0.5};
    const auto a = layer::gcd_attention(g, csr);
    const auto b = layer::gcd_attention(h, csr);
    for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(weight_of(a, 0, j), weight_of(b, 0, j), 1e-12);
}

TEST(Attention, RandomGraphsNormalizeAndStayPositive) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = testkit::random_graph(15, 2, 2, 0.2, rng);
        std::vector<double> gcd(15);
        for (auto& v : gcd) v = u(rng);
        for (std::size_t r = 0; r < 2; ++r) {
            const auto a = layer::gcd_attention(gcd, g.relation(r));
            for (std::size_t i = 0; i < 15; ++i) {
                if (g.degree(i, r) == 0) {
                    EXPECT_EQ(a.offsets[i + 1] - a.offsets[i], 0u);
                    continue;
                }
                double s = 0.0;
                for (std::size_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e) {
                    EXPECT_GT(a.values[e], 0.0);
                    s += a.values[e];
                }
                EXPECT_NEAR(s, 1.0, 1e-9);
            }
        }
    }
}

TEST(Attention, DropMasksEdgesAndFallsBack) {
    const auto csr = csr_of(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    std::vector<double> g(6, 0.2);
    std::mt19937_64 rng(3);
    const layer::AttentionOptions opt{0.2, 0.5, true};
    bool saw_mask = false;
    for (int k = 0; k < 50; ++k) {
        const auto a = layer::gcd_attention(g, csr, opt, &rng);
        const std::size_t kept = a.offsets[1] - a.offsets[0];
        EXPECT_GE(kept, 1u);
        saw_mask = saw_mask || kept < 5;
        double s = 0.0;
        for (std::size_t e = a.offsets[0]; e < a.offsets[1]; ++e) s += a.values[e];
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
    EXPECT_TRUE(saw_mask);

    // a lone edge survives either directly or through the fallback
    const auto pair = csr_of(2, {{0, 1}});
    const layer::AttentionOptions heavy{0.2, 0.99, true};
    for (int k = 0; k < 20; ++k) {
        const auto a = layer::gcd_attention(std::vector<double>{0.0, 0.0}, pair, heavy, &rng);
        ASSERT_EQ(a.offsets[1] - a.offsets[0], 1u);
        EXPECT_EQ(a.values[0], 1.0);
    }
}

TEST(Attention, DropInactiveOutsideTraining) {
    const auto csr = csr_of(4, {{0, 1}, {0, 2}, {0, 3}});
    std::vector<double> g{0.0, 0.1, 0.2, 0.3};
    const layer::AttentionOptions opt{0.2, 0.9, false};
    const auto a = layer::gcd_attention(g, csr, opt);
    EXPECT_EQ(a.offsets[1] - a.offsets[0], 3u);
}

TEST(Attention, RejectsBadInput) {
    const auto csr = csr_of(3, {{0, 1}});
    EXPECT_THROW(layer::gcd_attention(std::vector<double>{0.0, 0.0}, csr), ShapeError);
    const layer::AttentionOptions bad{0.2, 1.0, true};
    std::mt19937_64 rng(0);
    EXPECT_THROW(layer::gcd_attention(std::vector<double>(3, 0.0), csr, bad, &rng), ConfigError);
}

TEST(SelfMatrices, FlatIndexLayout) {
    std::mt19937_64 rng(5);
    layer::SelfMatrixGenerator gen("psi", 3, 2, rng);
    Tensor x = testkit::random_matrix(4, 3, rng);
    num::Tape tape;
    const Tensor& w = layer::self_matrices(tape, tape.constant(x), gen).value();
    ASSERT_EQ(w.rows(), 4u);
    ASSERT_EQ(w.cols(), 6u);
    const Tensor& W = gen.map.weight.tensor;
    const Tensor& b = gen.map.bias.tensor;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t c = 0; c < 2; ++c) {
                double flat = b(0, a * 2 + c);
                for (std::size_t k = 0; k < 3; ++k) flat += x(i, k) * W(k, a * 2 + c);
                EXPECT_NEAR(w(i, a * 2 + c), flat, 1e-14);
            }
}

TEST(SelfMatrices, ZeroGeneratorGivesZeroMatrices) {
    std::mt19937_64 rng(6);
    layer::SelfMatrixGenerator gen("psi", 3, 2, rng);
    for (double& v : gen.map.weight.tensor.storage()) v = 0.0;
    for (double& v : gen.map.bias.tensor.storage()) v = 0.0;
    num::Tape tape;
    const Tensor w = layer::self_matrices(tape, tape.constant(testkit::random_matrix(3, 3, rng)), gen).value();
    for (double v : w.storage()) EXPECT_EQ(v, 0.0);

    // zero input with zero bias, random weights
    layer::SelfMatrixGenerator gen2("psi", 3, 2, rng);
    for (double& v : gen2.map.bias.tensor.storage()) v = 0.0;
    num::Tape t2;
    const Tensor w2 = layer::self_matrices(t2, t2.constant(Tensor::matrix(2, 3)), gen2).value();
    for (double v : w2.storage()) EXPECT_EQ(v, 0.0);
}

namespace {

// Three-node line 0-1-2, per-node matrices, both perspectives.
struct LineCase {
    Tensor x = Tensor::from_rows({{1.0, -2.0}, {0.5, 3.0}, {-1.5, 0.25}});
    graph::MultiRelationGraph g{x, std::vector<graph::Label>(3, graph::Label::benign), {{{0, 1}, {1, 2}}}};
    std::vector<double> gcd{0.9, -0.4, 0.3};
};

} // namespace

TEST(Aggregate, LineGraphMatchesUnrolledOracle) {
    LineCase c;
    std::mt19937_64 rng(21);
    const std::size_t d = 2, dp = 3;
    auto typ = layer::PerspectiveTransform::make("t", true, d, dp, rng);
    auto atyp = layer::PerspectiveTransform::make("a", true, d, dp, rng);
    proto::GcdVector gv{c.gcd};
    layer::LayerConfig cfg;
    cfg.in_dim = d;
    cfg.out_dim = dp;
    const auto att = layer::build_attention<std::mt19937_64>(c.g, &gv, cfg, false, nullptr);

    num::Tape tape;
    Var x = tape.constant(c.x);
    const auto mt = layer::self_matrices(tape, x, *typ.generator);
    const auto ma = layer::self_matrices(tape, x, *atyp.generator);
    const Tensor m = layer::aggregate_messages(tape, x, att[0], typ, mt, &atyp, ma).value();

    auto alpha = [&](std::size_t j, double sign, const std::vector<std::size_t>& nb) {
        double z = 0.0;
        for (auto k : nb) z += std::exp(lrelu(sign * c.gcd[k]));
        return std::exp(lrelu(sign * c.gcd[j])) / z;
    };
    auto matrix_entry = [&](const layer::PerspectiveTransform& t, std::size_t i, std::size_t a, std::size_t b) {
        const Tensor& W = t.generator->map.weight.tensor;
        double v = t.generator->map.bias.tensor(0, a * dp + b);
        for (std::size_t k = 0; k < d; ++k) v += c.x(i, k) * W(k, a * dp + b);
        return v;
    };
    const std::vector<std::vector<std::size_t>> nbrs{{1}, {0, 2}, {1}};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t b = 0; b < dp; ++b) {
            double expect = 0.0;
            for (double sign : {1.0, -1.0}) {
                const auto& t = sign > 0 ? typ : atyp;
                for (std::size_t a = 0; a < d; ++a) {
                    double agg = 0.0;
                    for (auto j : nbrs[i]) agg += alpha(j, sign, nbrs[i]) * c.x(j, a);
                    expect += agg * matrix_entry(t, i, a, b);
                }
            }
            EXPECT_NEAR(m(i, b), expect, 1e-12) << i << "," << b;
        }
    }
}

TEST(Aggregate, SingleNeighborSumsBothMatrices) {
    Tensor x = Tensor::from_rows({{1.0, 2.0}, {-0.5, 0.75}});
    graph::MultiRelationGraph g(x, std::vector<graph::Label>(2, graph::Label::benign), {{{0, 1}}});
    std::mt19937_64 rng(8);
    auto typ = layer::PerspectiveTransform::make("t", false, 2, 2, rng);
    auto atyp = layer::PerspectiveTransform::make("a", false, 2, 2, rng);
    proto::GcdVector gv{{0.2, -0.6}};
    layer::LayerConfig cfg;
    cfg.in_dim = cfg.out_dim = 2;
    const auto att = layer::build_attention<std::mt19937_64>(g, &gv, cfg, false, nullptr);
    num::Tape tape;
    const Tensor m = layer::aggregate_messages(tape, tape.constant(x), att[0], typ, std::nullopt, &atyp, std::nullopt).value();
    const Tensor& A = typ.shared->tensor;
    const Tensor& B = atyp.shared->tensor;
    for (std::size_t b = 0; b < 2; ++b) {
        double e = 0.0;
        for (std::size_t a = 0; a < 2; ++a) e += x(1, a) * (A(a, b) + B(a, b));
        EXPECT_NEAR(m(0, b), e, 1e-14);
    }
}

TEST(Aggregate, IsolatedNodeGetsZeroMessage) {
    Tensor x = Tensor::from_rows({{1.0}, {2.0}, {3.0}});
    graph::MultiRelationGraph g(x, std::vector<graph::Label>(3, graph::Label::benign), {{{0, 1}}});
    std::mt19937_64 rng(9);
    auto typ = layer::PerspectiveTransform::make("t", true, 1, 2, rng);
    proto::GcdVector gv{{0.1, 0.2, 0.3}};
    layer::LayerConfig cfg;
    cfg.out_dim = 2;
    cfg.use_atypical = false;
    const auto att = layer::build_attention<std::mt19937_64>(g, &gv, cfg, false, nullptr);
    EXPECT_FALSE(att[0].atyp.has_value());
    num::Tape tape;
    Var xv = tape.constant(x);
    const auto mt = layer::self_matrices(tape, xv, *typ.generator);
    const Tensor m = layer::aggregate_messages(tape, xv, att[0], typ, mt, nullptr, std::nullopt).value();
    EXPECT_EQ(m(2, 0), 0.0);
    EXPECT_EQ(m(2, 1), 0.0);
}

namespace {

// Straight-line reimplementation of one full layer: attention per relation
// and perspective, per-node matrices, relation sum, self path, combiner.
std::vector<std::vector<double>> scripted_layer(const graph::MultiRelationGraph& g, const std::vector<double>& gcd,
                                                layer::GcdLayer& L) {
    const std::size_t n = g.n_nodes(), d = L.config.in_dim, dp = L.config.out_dim;
    const Tensor& x = g.features();
    std::vector<std::vector<double>> msg(n, std::vector<double>(dp, 0.0));
    for (std::size_t r = 0; r < g.n_relations(); ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto nb = g.neighbors(i, r);
            if (nb.empty()) continue;
            for (double sign : {1.0, -1.0}) {
                layer::PerspectiveTransform& t = sign > 0 ? L.typ : *L.atyp;
                double z = 0.0;
                for (auto j : nb) z += std::exp(lrelu(sign * gcd[j]));
                std::vector<double> agg(d, 0.0);
                for (auto j : nb) {
                    const double a = std::exp(lrelu(sign * gcd[j])) / z;
                    for (std::size_t k = 0; k < d; ++k) agg[k] += a * x(j, k);
                }
                const Tensor& W = t.generator->map.weight.tensor;
                const Tensor& B = t.generator->map.bias.tensor;
                for (std::size_t b = 0; b < dp; ++b) {
                    double s = 0.0;
                    for (std::size_t a = 0; a < d; ++a) {
                        double w = B(0, a * dp + b);
                        for (std::size_t k = 0; k < d; ++k) w += x(i, k) * W(k, a * dp + b);
                        s += agg[a] * w;
                    }
                    msg[i][b] += s;
                }
            }
        }
    }
    const Tensor& U = L.self_path.weight.tensor;
    const Tensor& u = L.self_path.bias.tensor;
    const Tensor& C = L.combiner.weight.tensor;
    const Tensor& cb = L.combiner.bias.tensor;
    std::vector<std::vector<double>> out(n, std::vector<double>(dp));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> cat(2 * dp);
        for (std::size_t b = 0; b < dp; ++b) {
            double s = u(0, b);
            for (std::size_t k = 0; k < d; ++k) s += x(i, k) * U(k, b);
            cat[b] = s;
            cat[dp + b] = msg[i][b];
        }
        for (std::size_t b = 0; b < dp; ++b) {
            double s = cb(0, b);
            for (std::size_t k = 0; k < 2 * dp; ++k) s += cat[k] * C(k, b);
            out[i][b] = lrelu(s);
        }
    }
    return out;
}

} // namespace

TEST(LayerForward, MatchesScriptedOracle) {
    std::mt19937_64 rng(31);
    const auto g = testkit::random_graph(5, 3, 2, 0.4, rng, 1);
    std::vector<double> gcd{0.5, -0.9, 0.1, 0.7, -0.2};
    layer::LayerConfig cfg;
    cfg.in_dim = 3;
    cfg.out_dim = 2;
    layer::GcdLayer L("l0", cfg, rng);
    proto::GcdVector gv{gcd};
    const auto att = layer::build_attention<std::mt19937_64>(g, &gv, cfg, false, nullptr);
    num::Tape tape;
    const Tensor h = layer::layer_forward(tape, tape.constant(g.features()), att, L).value();
    const auto oracle = scripted_layer(g, gcd, L);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t b = 0; b < 2; ++b) EXPECT_NEAR(h(i, b), oracle[i][b], 1e-10);
}

TEST(LayerForward, ZeroMessagesLeaveSelfPath) {
    std::mt19937_64 rng(32);
    const auto g = testkit::random_graph(6, 2, 1, 0.5, rng, 1);
    layer::LayerConfig cfg;
    cfg.in_dim = 2;
    cfg.out_dim = 2;
    layer::GcdLayer L("l0", cfg, rng);
    for (auto* t : {&L.typ, &*L.atyp}) {
        for (double& v : t->generator->map.weight.tensor.storage()) v = 0.0;
        for (double& v : t->generator->map.bias.tensor.storage()) v = 0.0;
    }
    proto::GcdVector gv{{0.1, 0.2, 0.3, -0.4, 0.5, -0.6}};
    const auto att = layer::build_attention<std::mt19937_64>(g, &gv, cfg, false, nullptr);
    num::Tape tape;
    const Tensor h = layer::layer_forward(tape, tape.constant(g.features()), att, L).value();
    num::Tape t2;
    const Tensor h0 = layer::layer_forward(t2, t2.constant(g.features()), {}, L).value();
    EXPECT_EQ(h, h0);
}

TEST(LayerForward, AutomorphicNodesMatch) {
    // star: nodes 1 and 2 both attach only to 0 and share a feature row
    Tensor x = Tensor::from_rows({{0.3, -0.2}, {1.0, 0.5}, {1.0, 0.5}});
    graph::MultiRelationGraph g(x, std::vector<graph::Label>(3, graph::Label::benign), {{{0, 1}, {0, 2}}});
    std::mt19937_64 rng(33);
    layer::LayerConfig cfg;
    cfg.in_dim = 2;
    cfg.out_dim = 3;
    layer::GcdLayer L("l0", cfg, rng);
    proto::GcdVector gv{{0.4, -0.1, -0.1}};
    const auto att = layer::build_attention<std::mt19937_64>(g, &gv, cfg, false, nullptr);
    num::Tape tape;
    const Tensor h = layer::layer_forward(tape, tape.constant(x), att, L).value();
    for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(h(1, b), h(2, b));
}

TEST(LayerForward, LightweightFlagsMatchM1Wiring) {
    std::mt19937_64 rng(34);
    const auto g = testkit::random_graph(8, 3, 2, 0.3, rng);
    layer::LayerConfig cfg;
    cfg.in_dim = 3;
    cfg.out_dim = 2;
    cfg.use_self_matrix = false;
    cfg.use_atypical = false;
    std::mt19937_64 r1(7), r2(7);
    layer::GcdLayer a("l0", cfg, r1);
    layer::GcdLayer b("l0", cfg, r2);
    EXPECT_FALSE(a.atyp.has_value());
    EXPECT_TRUE(a.typ.shared.has_value());
    proto::GcdVector gv{{0.1, -0.2, 0.3, -0.4, 0.5, -0.6, 0.7, -0.8}};
    const auto att = layer::build_attention<std::mt19937_64>(g, &gv, cfg, false, nullptr);
    num::Tape t1, t2;
    EXPECT_EQ(layer::layer_forward(t1, t1.constant(g.features()), att, a).value(),
              layer::layer_forward(t2, t2.constant(g.features()), att, b).value());
}

TEST(LayerForward, RejectsWrongInputWidth) {
    std::mt19937_64 rng(35);
    layer::LayerConfig cfg;
    cfg.in_dim = 3;
    cfg.out_dim = 2;
    layer::GcdLayer L("l0", cfg, rng);
    num::Tape tape;
    EXPECT_THROW(layer::layer_forward(tape, tape.constant(Tensor::matrix(4, 2)), {}, L), ShapeError);
}

TEST(LayerForward, GradientsMatchFiniteDifferences) {
    std::mt19937_64 rng(36);
    const auto g = testkit::random_graph(7, 3, 2, 0.35, rng);
    layer::LayerConfig cfg;
    cfg.in_dim = 3;
    cfg.out_dim = 2;
    layer::GcdLayer L("l0", cfg, rng);
    proto::GcdVector gv{{0.5, -0.9, 0.1, 0.7, -0.2, 0.3, -0.6}};
    const auto att = layer::build_attention<std::mt19937_64>(g, &gv, cfg, false, nullptr);
    Tensor x = g.features();
    std::vector<num::Parameter*> params;
    L.collect(params);
    std::vector<Tensor*> leaves{&x};
    for (auto* p : params) leaves.push_back(&p->tensor);
    const auto check = testkit::check_gradients(leaves, [&](num::Tape& tape) {
        Var h = layer::layer_forward(tape, tape.leaf(x), att, L);
        return num::sum(num::mul(h, h));
    });
    EXPECT_GT(check.checked, 50u);
    EXPECT_LT(check.max_rel_error, 1e-6);
}

TEST(Backbone, UniformAttentionIgnoresGcd) {
    std::mt19937_64 rng(37);
    const auto g = testkit::random_graph(6, 2, 2, 0.4, rng);
    layer::LayerConfig cfg;
    cfg.use_gcd = false;
    const auto att = layer::build_attention<std::mt19937_64>(g, nullptr, cfg, false, nullptr);
    ASSERT_EQ(att.size(), 2u);
    for (std::size_t r = 0; r < 2; ++r) {
        EXPECT_FALSE(att[r].atyp.has_value());
        for (std::size_t i = 0; i < 6; ++i)
            for (auto j : g.neighbors(i, r)) EXPECT_EQ(weight_of(att[r].typ, i, j), 1.0 / g.degree(i, r));
    }
}

TEST(Classify, ZeroHeadGivesHalf) {
    std::mt19937_64 rng(38);
    layer::ClassifierHead head(3, 4, rng);
    for (double& v : head.mlp.second.weight.tensor.storage()) v = 0.0;
    for (double& v : head.mlp.second.bias.tensor.storage()) v = 0.0;
    num::Tape tape;
    const Tensor p = layer::classify(tape, tape.constant(testkit::random_matrix(5, 3, rng)), head).value();
    for (double v : p.storage()) EXPECT_EQ(v, 0.5);
}

TEST(Classify, ProbabilitiesOpenIntervalAndMonotone) {
    std::mt19937_64 rng(39);
    layer::ClassifierHead head(2, 3, rng);
    num::Tape tape;
    const Tensor p = layer::classify(tape, tape.constant(testkit::random_matrix(20, 2, rng, -3, 3)), head).value();
    for (double v : p.storage()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
    // raising the output bias raises every probability
    head.mlp.second.bias.tensor[0] += 0.5;
    num::Tape t2;
    Tensor x = testkit::random_matrix(5, 2, rng);
    const Tensor lo = layer::classify(t2, t2.constant(x), head).value();
    head.mlp.second.bias.tensor[0] += 0.1;
    num::Tape t3;
    const Tensor hi = layer::classify(t3, t3.constant(x), head).value();
    for (std::size_t i = 0; i < 5; ++i) EXPECT_GT(hi[i], lo[i]);
}

TEST(Classify, ThresholdRule) {
    EXPECT_EQ(layer::predict_label(0.49), 0);
    EXPECT_EQ(layer::predict_label(0.51), 1);
    EXPECT_EQ(layer::predict_label(0.5), 1);
    EXPECT_EQ(layer::predict_label(0.7, 0.8), 0);
}
