#ifndef GCDNET_NUMKERNEL_ADAM_HPP
#define GCDNET_NUMKERNEL_ADAM_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/numkernel/tensor.hpp"

namespace gcdnet::num {

struct AdamOptions {
    double lr = 0.005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

/// One bias-corrected Adam update over `params`, then clears their gradients.
/// Weight decay is added to the gradient (L2 form). Returns the number of
/// parameters skipped because they carried no gradient.
inline std::size_t adam_step(const std::vector<Parameter*>& params, const AdamOptions& opt) {
    if (!(opt.lr >= 0.0)) throw ConfigError("adam_step: learning rate must be non-negative");
    std::size_t skipped = 0;
    for (Parameter* p : params) {
        if (!p->tensor.has_grad()) {
            ++skipped;
            continue;
        }
        auto& g = p->tensor.grad();
        auto& w = p->tensor.storage();
        ++p->step_count;
        const double t = static_cast<double>(p->step_count);
        const double c1 = 1.0 - std::pow(opt.beta1, t);
        const double c2 = 1.0 - std::pow(opt.beta2, t);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double gk = g[k] + opt.weight_decay * w[k];
            p->adam_m[k] = opt.beta1 * p->adam_m[k] + (1.0 - opt.beta1) * gk;
            p->adam_v[k] = opt.beta2 * p->adam_v[k] + (1.0 - opt.beta2) * gk * gk;
            const double m_hat = p->adam_m[k] / c1;
            const double v_hat = p->adam_v[k] / c2;
            w[k] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.eps);
        }
        p->tensor.clear_grad();
    }
    return skipped;
}

} // namespace gcdnet::num

#endif // GCDNET_NUMKERNEL_ADAM_HPP
