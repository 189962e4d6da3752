// SPDX-License-Identifier: MIT
#pragma once

#include "cqd/tensor.hpp"

#include <array>

namespace cqd {

/// Full HOSVD of a third-order tensor.
///
/// factors[n] is I_n x I_n orthogonal; its columns are the left singular
/// vectors of unfold(x, n), sign-fixed so the largest-magnitude entry of each
/// column is nonnegative. svals[n] has length I_n, descending, zero-padded when
/// the unfolding has fewer columns than rows.
struct HosvdFactorization {
    Tensor3 core;
    std::array<Matrix, 3> factors;
    std::array<Vector, 3> svals;

    [[nodiscard]] const Shape3& shape() const noexcept { return core.shape(); }
};

/// Left singular vectors and (zero-padded) singular values of a matrix, with
/// the sign convention above applied.
struct LeftSingular {
    Matrix u;
    Vector s;
};
LeftSingular left_singular(const Matrix& a);

HosvdFactorization hosvd(const Tensor3& x);

/// x x_1 P_1 x_2 P_2 x_3 P_3 where P_n projects onto the leading ranks[n]
/// left singular vectors of unfold(x, n).
Tensor3 truncated_reconstruct(const HosvdFactorization& f, const Ranks3& ranks);

/// Sum over modes of the squared singular values discarded at `ranks`.
double tail_energy(const HosvdFactorization& f, const Ranks3& ranks);

/// Ambient tensor of a Tucker form core x_1 U1 x_2 U2 x_3 U3.
Tensor3 tucker_to_tensor(const Tensor3& core, const std::array<Matrix, 3>& factors);

}  // namespace cqd
