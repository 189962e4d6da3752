// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace cqd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Shape3 = std::array<std::size_t, 3>;
using Ranks3 = std::array<std::size_t, 3>;

/// Dense third-order tensor, row-major over (i, j, k).
///
/// Extents may be zero (an empty tensor); this only arises for rank-0
/// truncations and empty query cores. Constructors reject non-finite data.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(Shape3 shape);
    Tensor3(Shape3 shape, std::vector<double> data);

    [[nodiscard]] const Shape3& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t dim(std::size_t mode) const { return shape_.at(mode); }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }

    [[nodiscard]] double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[offset(i, j, k)];
    }
    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[offset(i, j, k)];
    }

    [[nodiscard]] double squared_norm() const noexcept;
    [[nodiscard]] double norm() const noexcept;

    Tensor3& operator+=(const Tensor3& other);
    Tensor3& operator-=(const Tensor3& other);
    Tensor3& operator*=(double s) noexcept;

    friend bool operator==(const Tensor3&, const Tensor3&) = default;

private:
    [[nodiscard]] std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return (i * shape_[1] + j) * shape_[2] + k;
    }
    void require_same_shape(const Tensor3& other) const;

    Shape3 shape_{0, 0, 0};
    std::vector<double> data_;
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(double s, Tensor3 a);

/// Frobenius inner product; shapes must match.
double inner(const Tensor3& a, const Tensor3& b);

/// Mode-n unfolding: the mode axis moves first and the remaining two axes are
/// flattened in their original relative order (row-major).
Matrix unfold(const Tensor3& x, std::size_t mode);

/// Inverse of unfold.
Tensor3 fold(const Matrix& m, std::size_t mode, const Shape3& shape);

/// Y = X x_mode A, i.e. unfold(Y, mode) = A * unfold(X, mode).
Tensor3 mode_n_product(const Tensor3& x, const Matrix& a, std::size_t mode);

/// Product of the three extents.
[[nodiscard]] constexpr std::size_t volume(const Shape3& s) noexcept { return s[0] * s[1] * s[2]; }

}  // namespace cqd
