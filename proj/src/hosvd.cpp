// SPDX-License-Identifier: MIT
#include "cqd/hosvd.hpp"

#include "cqd/errors.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace cqd {

namespace {

void fix_signs(Matrix& u) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::Index arg = 0;
        u.col(c).cwiseAbs().maxCoeff(&arg);
        if (u(arg, c) < 0.0) u.col(c) *= -1.0;
    }
}

void require_ranks(const Shape3& shape, const Ranks3& ranks) {
    for (std::size_t n = 0; n < 3; ++n) {
        if (ranks[n] > shape[n]) {
            throw ArgumentError("rank " + std::to_string(ranks[n]) + " exceeds extent " +
                                std::to_string(shape[n]) + " in mode " + std::to_string(n));
        }
    }
}

}  // namespace

LeftSingular left_singular(const Matrix& a) {
    const Eigen::Index m = a.rows();
    LeftSingular out{Matrix::Identity(m, m), Vector::Zero(m)};
    if (m == 0 || a.cols() == 0) return out;

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
    out.u = svd.matrixU();
    out.s.head(svd.singularValues().size()) = svd.singularValues();
    fix_signs(out.u);
    return out;
}

HosvdFactorization hosvd(const Tensor3& x) {
    HosvdFactorization f;
    for (std::size_t n = 0; n < 3; ++n) {
        auto [u, s] = left_singular(unfold(x, n));
        f.factors[n] = std::move(u);
        f.svals[n] = std::move(s);
    }
    Tensor3 g = x;
    for (std::size_t n = 0; n < 3; ++n) g = mode_n_product(g, f.factors[n].transpose(), n);
    f.core = std::move(g);
    return f;
}

Tensor3 tucker_to_tensor(const Tensor3& core, const std::array<Matrix, 3>& factors) {
    Tensor3 x = core;
    for (std::size_t n = 0; n < 3; ++n) x = mode_n_product(x, factors[n], n);
    return x;
}

Tensor3 truncated_reconstruct(const HosvdFactorization& f, const Ranks3& ranks) {
    require_ranks(f.shape(), ranks);
    // Leading core block times leading factor columns equals x x_n P_n.
    Tensor3 block(ranks);
    for (std::size_t i = 0; i < ranks[0]; ++i)
        for (std::size_t j = 0; j < ranks[1]; ++j)
            for (std::size_t k = 0; k < ranks[2]; ++k) block(i, j, k) = f.core(i, j, k);
    std::array<Matrix, 3> lead;
    for (std::size_t n = 0; n < 3; ++n) lead[n] = f.factors[n].leftCols(static_cast<Eigen::Index>(ranks[n]));
    return tucker_to_tensor(block, lead);
}

double tail_energy(const HosvdFactorization& f, const Ranks3& ranks) {
    require_ranks(f.shape(), ranks);
    double total = 0.0;
    for (std::size_t n = 0; n < 3; ++n) {
        const Vector& s = f.svals[n];
        for (Eigen::Index i = static_cast<Eigen::Index>(ranks[n]); i < s.size(); ++i) total += s(i) * s(i);
    }
    return total;
}

}  // namespace cqd
