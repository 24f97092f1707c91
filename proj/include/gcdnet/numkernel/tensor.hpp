#ifndef GCDNET_NUMKERNEL_TENSOR_HPP
#define GCDNET_NUMKERNEL_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gcdnet/errors.hpp"

namespace gcdnet::num {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i != 0) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

/// Dense row-major array of doubles with an optional gradient buffer.
///
/// Every operation in this library treats a tensor as a matrix: rank-1
/// tensors are column vectors and higher ranks fold trailing dimensions
/// into the column count.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape shape, double fill = 0.0)
        : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

    Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
        if (shape_size(shape_) != data_.size()) {
            throw ShapeError("tensor shape " + shape_string(shape_) + " holds " +
                             std::to_string(shape_size(shape_)) + " values, got " +
                             std::to_string(data_.size()));
        }
    }

    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
        return Tensor({rows, cols}, fill);
    }

    /// Nested initializer, row by row: `Tensor::from_rows({{1, 2}, {3, 4}})`.
    static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t n = rows.size();
        const std::size_t m = n == 0 ? 0 : rows.begin()->size();
        std::vector<double> data;
        data.reserve(n * m);
        for (const auto& row : rows) {
            if (row.size() != m) throw ShapeError("ragged row in Tensor::from_rows");
            data.insert(data.end(), row.begin(), row.end());
        }
        return Tensor({n, m}, std::move(data));
    }

    static Tensor column(std::vector<double> values) {
        const std::size_t n = values.size();
        return Tensor({n, 1}, std::move(values));
    }

    static Tensor identity(std::size_t n) {
        Tensor t = matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
        return t;
    }

    /// Uniform in [-bound, bound].
    template <typename Rng>
    static Tensor uniform(Shape shape, double bound, Rng& rng) {
        Tensor t(std::move(shape));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& v : t.data_) v = dist(rng);
        return t;
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t rank() const noexcept { return shape_.size(); }

    std::size_t rows() const noexcept { return shape_.empty() ? 1 : shape_[0]; }
    std::size_t cols() const noexcept {
        if (shape_.size() < 2) return 1;
        return shape_size(shape_) / shape_[0];
    }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::vector<double>& storage() noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }

    bool requires_grad() const noexcept { return requires_grad_; }
    void set_requires_grad(bool on) noexcept { requires_grad_ = on; }

    bool has_grad() const noexcept { return grad_.has_value(); }
    std::vector<double>& grad() {
        if (!grad_) grad_.emplace(data_.size(), 0.0);
        return *grad_;
    }
    const std::optional<std::vector<double>>& grad_buffer() const noexcept { return grad_; }
    void clear_grad() noexcept { grad_.reset(); }

    Tensor reshaped(Shape shape) const {
        Tensor t(std::move(shape), data_);
        return t;
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    Shape shape_;
    std::vector<double> data_;
    bool requires_grad_ = false;
    std::optional<std::vector<double>> grad_;
};

/// A trainable tensor plus its Adam moments.
struct Parameter {
    std::string name;
    Tensor tensor;
    std::vector<double> adam_m;
    std::vector<double> adam_v;
    std::size_t step_count = 0;

    Parameter() = default;
    Parameter(std::string n, Tensor t) : name(std::move(n)), tensor(std::move(t)) {
        tensor.set_requires_grad(true);
        adam_m.assign(tensor.size(), 0.0);
        adam_v.assign(tensor.size(), 0.0);
    }

    std::size_t size() const noexcept { return tensor.size(); }
};

/// Weight initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename Rng>
Parameter init_parameter(std::string name, Shape shape, std::size_t fan_in, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
    return Parameter(std::move(name), Tensor::uniform(std::move(shape), bound, rng));
}

} // namespace gcdnet::num

#endif // GCDNET_NUMKERNEL_TENSOR_HPP
