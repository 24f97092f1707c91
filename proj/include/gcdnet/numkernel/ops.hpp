#ifndef GCDNET_NUMKERNEL_OPS_HPP
#define GCDNET_NUMKERNEL_OPS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/numkernel/tape.hpp"
#include "gcdnet/numkernel/tensor.hpp"

namespace gcdnet::num {

namespace detail {

inline void require_same_tape(const Var& a, const Var& b) {
    if (a.tape != b.tape) throw ContractError("operands recorded on different tapes");
}

inline void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
    }
}

inline bool any_grad(Tape& t, std::initializer_list<std::size_t> ids) {
    for (auto id : ids)
        if (t.needs_grad(id)) return true;
    return false;
}

// c[m x n] += a[m x k] * b[k x n]
inline void gemm_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            if (av == 0.0) continue;
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

inline double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace detail

/// Plain (untaped) matrix product.
inline Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions differ, " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
    }
    Tensor out = Tensor::matrix(a.rows(), b.cols());
    detail::gemm_acc(a.storage().data(), b.storage().data(), out.storage().data(), a.rows(), a.cols(), b.cols());
    return out;
}

inline Var matmul(Var a, Var b) {
    detail::require_same_tape(a, b);
    Tape& t = *a.tape;
    Tensor out = matmul(a.value(), b.value());
    const std::size_t m = a.value().rows(), k = a.value().cols(), n = b.value().cols();
    return t.record(std::move(out), detail::any_grad(t, {a.id, b.id}), [ia = a.id, ib = b.id, m, k, n](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        if (tp.needs_grad(ia)) {
            const auto& bv = tp.value(ib).storage();
            auto& ga = tp.adjoint(ia);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * bv[p * n + j];
                    ga[i * k + p] += s;
                }
        }
        if (tp.needs_grad(ib)) {
            const auto& av = tp.value(ia).storage();
            auto& gb = tp.adjoint(ib);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    const double aip = av[i * k + p];
                    if (aip == 0.0) continue;
                    for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
                }
        }
    });
}

inline Var add(Var a, Var b) {
    detail::require_same_tape(a, b);
    detail::require_same_shape("add", a.value(), b.value());
    Tape& t = *a.tape;
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
    return t.record(std::move(out), detail::any_grad(t, {a.id, b.id}), [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        for (auto id : {ia, ib}) {
            if (!tp.needs_grad(id)) continue;
            auto& gi = tp.adjoint(id);
            for (std::size_t k = 0; k < g.size(); ++k) gi[k] += g[k];
        }
    });
}

/// a [n x k] + bias broadcast over rows; bias holds k values.
inline Var add_row(Var a, Var bias) {
    detail::require_same_tape(a, bias);
    Tape& t = *a.tape;
    const std::size_t n = a.value().rows(), k = a.value().cols();
    if (bias.value().size() != k) {
        throw ShapeError("add_row: bias " + shape_string(bias.value().shape()) + " does not match " +
                         shape_string(a.value().shape()));
    }
    Tensor out = a.value();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) out(i, j) += bias.value()[j];
    return t.record(std::move(out), detail::any_grad(t, {a.id, bias.id}), [ia = a.id, ib = bias.id, n, k](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        if (tp.needs_grad(ia)) {
            auto& ga = tp.adjoint(ia);
            for (std::size_t q = 0; q < g.size(); ++q) ga[q] += g[q];
        }
        if (tp.needs_grad(ib)) {
            auto& gb = tp.adjoint(ib);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < k; ++j) gb[j] += g[i * k + j];
        }
    });
}

/// Elementwise product.
inline Var mul(Var a, Var b) {
    detail::require_same_tape(a, b);
    detail::require_same_shape("mul", a.value(), b.value());
    Tape& t = *a.tape;
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
    return t.record(std::move(out), detail::any_grad(t, {a.id, b.id}), [ia = a.id, ib = b.id](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        if (tp.needs_grad(ia)) {
            const auto& bv = tp.value(ib);
            auto& ga = tp.adjoint(ia);
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * bv[k];
        }
        if (tp.needs_grad(ib)) {
            const auto& av = tp.value(ia);
            auto& gb = tp.adjoint(ib);
            for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k] * av[k];
        }
    });
}

/// Elementwise product with a constant mask (dropout, edge masks).
inline Var mul_const(Var a, const Tensor& mask) {
    if (mask.size() != a.value().size()) {
        throw ShapeError("mul_const: shape mismatch " + shape_string(a.value().shape()) + " vs " +
                         shape_string(mask.shape()));
    }
    Tape& t = *a.tape;
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    return t.record(std::move(out), t.needs_grad(a.id), [ia = a.id, m = mask.storage()](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        auto& ga = tp.adjoint(ia);
        for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * m[k];
    });
}

inline Var scale(Var a, double c) {
    Tape& t = *a.tape;
    Tensor out = a.value();
    for (double& v : out.storage()) v *= c;
    return t.record(std::move(out), t.needs_grad(a.id), [ia = a.id, c](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        auto& ga = tp.adjoint(ia);
        for (std::size_t k = 0; k < g.size(); ++k) ga[k] += c * g[k];
    });
}

/// max(x, slope * x); the derivative at 0 is taken as `slope`.
inline Var leaky_relu(Var x, double slope = 0.2) {
    if (!(slope > 0.0 && slope < 1.0)) throw ContractError("leaky_relu: slope must lie in (0, 1)");
    Tape& t = *x.tape;
    Tensor out = x.value();
    for (double& v : out.storage()) v = v > 0.0 ? v : slope * v;
    return t.record(std::move(out), t.needs_grad(x.id), [ix = x.id, slope](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        const auto& xv = tp.value(ix);
        auto& gx = tp.adjoint(ix);
        for (std::size_t k = 0; k < g.size(); ++k) gx[k] += xv[k] > 0.0 ? g[k] : slope * g[k];
    });
}

inline double leaky_relu(double x, double slope = 0.2) { return x > 0.0 ? x : slope * x; }

inline double sigmoid(double x) { return detail::stable_sigmoid(x); }

inline Var sigmoid(Var x) {
    Tape& t = *x.tape;
    Tensor out = x.value();
    for (double& v : out.storage()) v = detail::stable_sigmoid(v);
    return t.record(std::move(out), t.needs_grad(x.id), [ix = x.id](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        const auto& s = tp.value(self);
        auto& gx = tp.adjoint(ix);
        for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k] * s[k] * (1.0 - s[k]);
    });
}

/// Softmax over groups of entries. `segment_ids[k]` names the group of
/// entry k; groups need not be contiguous. Groups with no entries are skipped.
inline std::vector<double> segment_softmax(std::span<const double> logits, std::span<const std::size_t> segment_ids,
                                           std::size_t n_segments) {
    if (logits.size() != segment_ids.size()) throw ShapeError("segment_softmax: logits and segment ids differ in length");
    std::vector<double> seg_max(n_segments, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        if (segment_ids[k] >= n_segments) throw BoundsError("segment_softmax: segment id out of range");
        seg_max[segment_ids[k]] = std::max(seg_max[segment_ids[k]], logits[k]);
    }
    std::vector<double> out(logits.size());
    std::vector<double> seg_sum(n_segments, 0.0);
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - seg_max[segment_ids[k]]);
        seg_sum[segment_ids[k]] += out[k];
    }
    for (std::size_t k = 0; k < logits.size(); ++k) out[k] /= seg_sum[segment_ids[k]];
    return out;
}

inline Var segment_softmax(Var logits, std::vector<std::size_t> segment_ids, std::size_t n_segments) {
    Tape& t = *logits.tape;
    const Tensor& lv = logits.value();
    auto w = segment_softmax(lv.values(), segment_ids, n_segments);
    Tensor out(lv.shape(), std::move(w));
    return t.record(std::move(out), t.needs_grad(logits.id),
                    [il = logits.id, seg = std::move(segment_ids), n_segments](Tape& tp, std::size_t self) {
                        const auto& g = tp.adjoint(self);
                        const auto& w = tp.value(self);
                        std::vector<double> dot(n_segments, 0.0);
                        for (std::size_t k = 0; k < g.size(); ++k) dot[seg[k]] += g[k] * w[k];
                        auto& gl = tp.adjoint(il);
                        for (std::size_t k = 0; k < g.size(); ++k) gl[k] += w[k] * (g[k] - dot[seg[k]]);
                    });
}

/// GraphNorm over the rows of x [n x d]:
///   c = x - alpha * mean(x);  out = gamma * c / sqrt(mean(c^2) + eps) + beta
/// with statistics per column and population variance.
inline Var graph_norm(Var x, Var gamma, Var beta, Var alpha, double eps = 1e-5) {
    Tape& t = *x.tape;
    const Tensor& xv = x.value();
    const std::size_t n = xv.rows(), d = xv.cols();
    if (n == 0) throw ContractError("graph_norm: needs at least one row");
    for (const Var* p : {&gamma, &beta, &alpha}) {
        if (p->value().size() != d) {
            throw ShapeError("graph_norm: per-column parameter " + shape_string(p->value().shape()) +
                             " does not match " + shape_string(xv.shape()));
        }
    }
    const Tensor& gv = gamma.value();
    const Tensor& bv = beta.value();
    const Tensor& av = alpha.value();

    std::vector<double> mean(d, 0.0), inv_std(d, 0.0);
    Tensor normed = Tensor::matrix(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xv(i, j);
        mean[j] = s / static_cast<double>(n);
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = xv(i, j) - av[j] * mean[j];
            v += c * c;
        }
        v /= static_cast<double>(n);
        inv_std[j] = 1.0 / std::sqrt(v + eps);
        for (std::size_t i = 0; i < n; ++i) normed(i, j) = (xv(i, j) - av[j] * mean[j]) * inv_std[j];
    }
    Tensor out = Tensor::matrix(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) out(i, j) = gv[j] * normed(i, j) + bv[j];

    const bool ng = detail::any_grad(t, {x.id, gamma.id, beta.id, alpha.id});
    return t.record(std::move(out), ng,
                    [ix = x.id, ig = gamma.id, ib = beta.id, ia = alpha.id, n, d, mean = std::move(mean),
                     inv_std = std::move(inv_std), normed = std::move(normed)](Tape& tp, std::size_t self) {
                        const auto& g = tp.adjoint(self);
                        const auto& gv = tp.value(ig);
                        const auto& av = tp.value(ia);
                        const double nn = static_cast<double>(n);
                        if (tp.needs_grad(ib)) {
                            auto& gb = tp.adjoint(ib);
                            for (std::size_t i = 0; i < n; ++i)
                                for (std::size_t j = 0; j < d; ++j) gb[j] += g[i * d + j];
                        }
                        if (tp.needs_grad(ig)) {
                            auto& gg = tp.adjoint(ig);
                            for (std::size_t i = 0; i < n; ++i)
                                for (std::size_t j = 0; j < d; ++j) gg[j] += g[i * d + j] * normed(i, j);
                        }
                        if (!tp.needs_grad(ix) && !tp.needs_grad(ia)) return;
                        for (std::size_t j = 0; j < d; ++j) {
                            // dc_i = dn_i * s^-1 - c_i * sum_k(dn_k c_k) / (n s^3), with c = normed * s
                            double dot = 0.0;
                            for (std::size_t i = 0; i < n; ++i) dot += g[i * d + j] * gv[j] * normed(i, j);
                            double dc_sum = 0.0;
                            std::vector<double> dc(n);
                            for (std::size_t i = 0; i < n; ++i) {
                                dc[i] = inv_std[j] * (g[i * d + j] * gv[j] - normed(i, j) * dot / nn);
                                dc_sum += dc[i];
                            }
                            if (tp.needs_grad(ia)) tp.adjoint(ia)[j] += -mean[j] * dc_sum;
                            if (tp.needs_grad(ix)) {
                                auto& gx = tp.adjoint(ix);
                                const double shift = -av[j] * dc_sum / nn;
                                for (std::size_t i = 0; i < n; ++i) gx[i * d + j] += dc[i] + shift;
                            }
                        }
                    });
}

/// Horizontal concatenation [a | b].
inline Var concat_cols(Var a, Var b) {
    detail::require_same_tape(a, b);
    const std::size_t n = a.value().rows();
    if (b.value().rows() != n) {
        throw ShapeError("concat_cols: row counts differ, " + shape_string(a.value().shape()) + " vs " +
                         shape_string(b.value().shape()));
    }
    const std::size_t ka = a.value().cols(), kb = b.value().cols();
    Tensor out = Tensor::matrix(n, ka + kb);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < ka; ++j) out(i, j) = a.value()(i, j);
        for (std::size_t j = 0; j < kb; ++j) out(i, ka + j) = b.value()(i, j);
    }
    Tape& t = *a.tape;
    return t.record(std::move(out), detail::any_grad(t, {a.id, b.id}), [ia = a.id, ib = b.id, n, ka, kb](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        const std::size_t k = ka + kb;
        if (tp.needs_grad(ia)) {
            auto& ga = tp.adjoint(ia);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < ka; ++j) ga[i * ka + j] += g[i * k + j];
        }
        if (tp.needs_grad(ib)) {
            auto& gb = tp.adjoint(ib);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < kb; ++j) gb[i * kb + j] += g[i * k + ka + j];
        }
    });
}

/// Per-row interpolation: out_i = w_i * a_i + (1 - w_i) * b_i, with w [n x 1].
inline Var lerp_rows(Var w, Var a, Var b) {
    detail::require_same_tape(w, a);
    detail::require_same_tape(a, b);
    detail::require_same_shape("lerp_rows", a.value(), b.value());
    const std::size_t n = a.value().rows(), d = a.value().cols();
    if (w.value().size() != n) {
        throw ShapeError("lerp_rows: weights " + shape_string(w.value().shape()) + " do not match " +
                         shape_string(a.value().shape()));
    }
    Tensor out = Tensor::matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w.value()[i];
        for (std::size_t j = 0; j < d; ++j) out(i, j) = wi * a.value()(i, j) + (1.0 - wi) * b.value()(i, j);
    }
    Tape& t = *a.tape;
    return t.record(std::move(out), detail::any_grad(t, {w.id, a.id, b.id}),
                    [iw = w.id, ia = a.id, ib = b.id, n, d](Tape& tp, std::size_t self) {
                        const auto& g = tp.adjoint(self);
                        const auto& wv = tp.value(iw);
                        if (tp.needs_grad(iw)) {
                            const auto& av = tp.value(ia);
                            const auto& bv = tp.value(ib);
                            auto& gw = tp.adjoint(iw);
                            for (std::size_t i = 0; i < n; ++i) {
                                double s = 0.0;
                                for (std::size_t j = 0; j < d; ++j) s += g[i * d + j] * (av(i, j) - bv(i, j));
                                gw[i] += s;
                            }
                        }
                        if (tp.needs_grad(ia)) {
                            auto& ga = tp.adjoint(ia);
                            for (std::size_t i = 0; i < n; ++i)
                                for (std::size_t j = 0; j < d; ++j) ga[i * d + j] += wv[i] * g[i * d + j];
                        }
                        if (tp.needs_grad(ib)) {
                            auto& gb = tp.adjoint(ib);
                            for (std::size_t i = 0; i < n; ++i)
                                for (std::size_t j = 0; j < d; ++j) gb[i * d + j] += (1.0 - wv[i]) * g[i * d + j];
                        }
                    });
}

/// Constant sparse matrix in CSR form; row i mixes rows `cols[offsets[i]..offsets[i+1])` of its operand.
struct SparseRows {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> cols;
    std::vector<double> values;
};

/// out = S * x for a constant sparse S.
inline Var spmm(const SparseRows& s, Var x) {
    const Tensor& xv = x.value();
    if (s.n_cols != xv.rows()) {
        throw ShapeError("spmm: sparse operand is " + std::to_string(s.n_rows) + "x" + std::to_string(s.n_cols) +
                         ", dense operand " + shape_string(xv.shape()));
    }
    const std::size_t d = xv.cols();
    Tensor out = Tensor::matrix(s.n_rows, d);
    for (std::size_t i = 0; i < s.n_rows; ++i)
        for (std::size_t e = s.offsets[i]; e < s.offsets[i + 1]; ++e) {
            const double w = s.values[e];
            const std::size_t j = s.cols[e];
            for (std::size_t c = 0; c < d; ++c) out(i, c) += w * xv(j, c);
        }
    Tape& t = *x.tape;
    return t.record(std::move(out), t.needs_grad(x.id), [ix = x.id, s, d](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        auto& gx = tp.adjoint(ix);
        for (std::size_t i = 0; i < s.n_rows; ++i)
            for (std::size_t e = s.offsets[i]; e < s.offsets[i + 1]; ++e) {
                const double w = s.values[e];
                const std::size_t j = s.cols[e];
                for (std::size_t c = 0; c < d; ++c) gx[j * d + c] += w * g[i * d + c];
            }
    });
}

/// Per-row vector-matrix product: row i of `flat` [n x (d*k)] is read as a
/// row-major d x k matrix M_i, and out_i = v_i^T M_i.
inline Var row_vecmat(Var v, Var flat, std::size_t k) {
    detail::require_same_tape(v, flat);
    const std::size_t n = v.value().rows(), d = v.value().cols();
    if (flat.value().rows() != n || flat.value().cols() != d * k) {
        throw ShapeError("row_vecmat: vectors " + shape_string(v.value().shape()) + " incompatible with matrices " +
                         shape_string(flat.value().shape()) + " for output width " + std::to_string(k));
    }
    Tensor out = Tensor::matrix(n, k);
    const auto& vv = v.value();
    const auto& fv = flat.value();
    for (std::size_t i = 0; i < n; ++i) {
        const double* mi = fv.storage().data() + i * d * k;
        for (std::size_t a = 0; a < d; ++a) {
            const double va = vv(i, a);
            for (std::size_t b = 0; b < k; ++b) out(i, b) += va * mi[a * k + b];
        }
    }
    Tape& t = *v.tape;
    return t.record(std::move(out), detail::any_grad(t, {v.id, flat.id}), [iv = v.id, iflat = flat.id, n, d, k](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        if (tp.needs_grad(iv)) {
            const auto& fv = tp.value(iflat).storage();
            auto& gv = tp.adjoint(iv);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t a = 0; a < d; ++a) {
                    double s = 0.0;
                    for (std::size_t b = 0; b < k; ++b) s += fv[i * d * k + a * k + b] * g[i * k + b];
                    gv[i * d + a] += s;
                }
        }
        if (tp.needs_grad(iflat)) {
            const auto& vv = tp.value(iv);
            auto& gf = tp.adjoint(iflat);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t a = 0; a < d; ++a) {
                    const double va = vv(i, a);
                    for (std::size_t b = 0; b < k; ++b) gf[i * d * k + a * k + b] += va * g[i * k + b];
                }
        }
    });
}

/// Selects rows of x in the given order.
inline Var gather_rows(Var x, std::vector<std::size_t> rows) {
    const Tensor& xv = x.value();
    const std::size_t d = xv.cols();
    Tensor out = Tensor::matrix(rows.size(), d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= xv.rows()) throw BoundsError("gather_rows: row index out of range");
        for (std::size_t c = 0; c < d; ++c) out(r, c) = xv(rows[r], c);
    }
    Tape& t = *x.tape;
    return t.record(std::move(out), t.needs_grad(x.id), [ix = x.id, rows = std::move(rows), d](Tape& tp, std::size_t self) {
        const auto& g = tp.adjoint(self);
        auto& gx = tp.adjoint(ix);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < d; ++c) gx[rows[r] * d + c] += g[r * d + c];
    });
}

inline Var sum(Var x) {
    double s = 0.0;
    for (double v : x.value().values()) s += v;
    Tape& t = *x.tape;
    return t.record(Tensor({1}, std::vector<double>{s}), t.needs_grad(x.id), [ix = x.id](Tape& tp, std::size_t self) {
        const double g = tp.adjoint(self)[0];
        for (double& v : tp.adjoint(ix)) v += g;
    });
}

/// Weighted binary cross-entropy on probabilities, normalized by the total weight:
///   L = -sum_i w_i [y_i log p_i + (1 - y_i) log(1 - p_i)] / sum_i w_i
/// with p clamped to [eps, 1 - eps].
inline Var weighted_bce(Var prob, std::vector<double> targets, std::vector<double> weights, double eps = 1e-12) {
    const Tensor& pv = prob.value();
    if (targets.size() != pv.size() || weights.size() != pv.size()) {
        throw ShapeError("weighted_bce: " + std::to_string(pv.size()) + " probabilities, " +
                         std::to_string(targets.size()) + " targets, " + std::to_string(weights.size()) + " weights");
    }
    double wsum = 0.0, loss = 0.0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const double p = std::clamp(pv[i], eps, 1.0 - eps);
        loss -= weights[i] * (targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p));
        wsum += weights[i];
    }
    if (!(wsum > 0.0)) throw ContractError("weighted_bce: total weight must be positive");
    loss /= wsum;
    Tape& t = *prob.tape;
    return t.record(Tensor({1}, std::vector<double>{loss}), t.needs_grad(prob.id),
                    [ip = prob.id, y = std::move(targets), w = std::move(weights), wsum, eps](Tape& tp, std::size_t self) {
                        const double g = tp.adjoint(self)[0];
                        const auto& pv = tp.value(ip);
                        auto& gp = tp.adjoint(ip);
                        for (std::size_t i = 0; i < y.size(); ++i) {
                            const double p = std::clamp(pv[i], eps, 1.0 - eps);
                            gp[i] += g * w[i] * (-(y[i] / p) + (1.0 - y[i]) / (1.0 - p)) / wsum;
                        }
                    });
}

} // namespace gcdnet::num

#endif // GCDNET_NUMKERNEL_OPS_HPP
