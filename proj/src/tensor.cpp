// SPDX-License-Identifier: MIT
#include "cqd/tensor.hpp"

#include "cqd/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace cqd {

namespace {

void require_mode(std::size_t mode) {
    if (mode > 2) throw ArgumentError("mode index must be 0, 1 or 2, got " + std::to_string(mode));
}

// Axes other than `mode`, in their original order.
std::array<std::size_t, 2> other_axes(std::size_t mode) {
    switch (mode) {
        case 0: return {1, 2};
        case 1: return {0, 2};
        default: return {0, 1};
    }
}

}  // namespace

Tensor3::Tensor3(Shape3 shape) : shape_(shape), data_(volume(shape), 0.0) {}

Tensor3::Tensor3(Shape3 shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != volume(shape_)) {
        throw ArgumentError("tensor data length " + std::to_string(data_.size()) +
                            " does not match shape volume " + std::to_string(volume(shape_)));
    }
    for (double v : data_) {
        if (!std::isfinite(v)) throw ArgumentError("tensor data must be finite");
    }
}

double Tensor3::squared_norm() const noexcept {
    return std::inner_product(data_.begin(), data_.end(), data_.begin(), 0.0);
}

double Tensor3::norm() const noexcept { return std::sqrt(squared_norm()); }

void Tensor3::require_same_shape(const Tensor3& other) const {
    if (shape_ != other.shape_) throw ArgumentError("tensor shape mismatch");
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Tensor3& Tensor3::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

double inner(const Tensor3& a, const Tensor3& b) {
    if (a.shape() != b.shape()) throw ArgumentError("tensor shape mismatch");
    const auto x = a.data();
    const auto y = b.data();
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

Matrix unfold(const Tensor3& x, std::size_t mode) {
    require_mode(mode);
    const Shape3& s = x.shape();
    const auto [a, b] = other_axes(mode);
    Matrix m(static_cast<Eigen::Index>(s[mode]), static_cast<Eigen::Index>(s[a] * s[b]));
    std::array<std::size_t, 3> idx{};
    for (idx[0] = 0; idx[0] < s[0]; ++idx[0])
        for (idx[1] = 0; idx[1] < s[1]; ++idx[1])
            for (idx[2] = 0; idx[2] < s[2]; ++idx[2])
                m(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(idx[a] * s[b] + idx[b])) =
                    x(idx[0], idx[1], idx[2]);
    return m;
}

Tensor3 fold(const Matrix& m, std::size_t mode, const Shape3& shape) {
    require_mode(mode);
    const auto [a, b] = other_axes(mode);
    if (static_cast<std::size_t>(m.rows()) != shape[mode] ||
        static_cast<std::size_t>(m.cols()) != shape[a] * shape[b]) {
        throw ArgumentError("matrix of size " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            " cannot be folded along mode " + std::to_string(mode));
    }
    Tensor3 x(shape);
    std::array<std::size_t, 3> idx{};
    for (idx[0] = 0; idx[0] < shape[0]; ++idx[0])
        for (idx[1] = 0; idx[1] < shape[1]; ++idx[1])
            for (idx[2] = 0; idx[2] < shape[2]; ++idx[2])
                x(idx[0], idx[1], idx[2]) =
                    m(static_cast<Eigen::Index>(idx[mode]), static_cast<Eigen::Index>(idx[a] * shape[b] + idx[b]));
    return x;
}

Tensor3 mode_n_product(const Tensor3& x, const Matrix& a, std::size_t mode) {
    require_mode(mode);
    if (static_cast<std::size_t>(a.cols()) != x.dim(mode)) {
        throw ArgumentError("mode_n_product: matrix has " + std::to_string(a.cols()) + " columns, mode " +
                            std::to_string(mode) + " has extent " + std::to_string(x.dim(mode)));
    }
    Shape3 out = x.shape();
    out[mode] = static_cast<std::size_t>(a.rows());
    const Matrix y = a * unfold(x, mode);
    return fold(y, mode, out);
}

}  // namespace cqd
