#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "netcond/errors.hpp"

namespace netcond {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
    if (shape.empty()) return 0;
    std::size_t n = 1;
    for (std::size_t extent : shape) {
        if (extent == 0) throw InvalidArgument("tensor shape extents must be positive");
        n *= extent;
    }
    return n;
}

inline std::string shape_str(const Shape& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

// Dense n-dimensional array of binary64 values, row-major.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape shape, double fill = 0.0)
        : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

    Tensor(Shape shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != shape_size(shape_))
            throw InvalidArgument("tensor data length " + std::to_string(data_.size()) +
                                  " does not match shape " + shape_str(shape_));
    }

    static Tensor vector(std::vector<double> data) {
        Shape shape{data.size()};
        return Tensor(std::move(shape), std::move(data));
    }

    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
        return Tensor(Shape{rows, cols}, std::move(data));
    }

    static Tensor identity(std::size_t n) {
        Tensor m(Shape{n, n});
        for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
        return m;
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::vector<double>& values() noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    // Rank-2 accessors.
    double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    std::size_t rows() const { return shape_.at(0); }
    std::size_t cols() const { return shape_.at(1); }

    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

    bool all_finite() const noexcept {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Tensor reshaped(Shape shape) const {
        if (shape_size(shape) != data_.size())
            throw InvalidArgument("reshape to " + shape_str(shape) + " does not preserve size");
        return Tensor(std::move(shape), data_);
    }

    Tensor flattened() const { return reshaped(Shape{data_.size()}); }

    Tensor& operator+=(const Tensor& other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }

    Tensor& operator-=(const Tensor& other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
        return *this;
    }

    Tensor& operator*=(double c) {
        for (double& v : data_) v *= c;
        return *this;
    }

    friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
    friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
    friend Tensor operator*(Tensor a, double c) { return a *= c; }
    friend Tensor operator*(double c, Tensor a) { return a *= c; }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    void require_same_shape(const Tensor& other) const {
        if (shape_ != other.shape_)
            throw InvalidArgument("tensor shape mismatch: " + shape_str(shape_) +
                                  " vs " + shape_str(other.shape_));
    }

    Shape shape_;
    std::vector<double> data_;
};

inline double dot(const Tensor& a, const Tensor& b) {
    if (a.size() != b.size())
        throw InvalidArgument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace netcond
