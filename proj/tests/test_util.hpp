// SPDX-License-Identifier: MIT
#pragma once

#include "cqd/experiments.hpp"
#include "cqd/random_stream.hpp"
#include "cqd/tensor.hpp"

namespace cqd::testing {

inline double max_abs_diff(const Tensor3& a, const Tensor3& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double rel_error(const Tensor3& approx, const Tensor3& exact) {
    const double denom = exact.norm();
    return denom == 0.0 ? (approx - exact).norm() : (approx - exact).norm() / denom;
}

// Tensor of exact multilinear rank `ranks`: random core times orthonormal factors.
inline Tensor3 low_rank_tensor(const Shape3& shape, const Ranks3& ranks, RandomStream& rng) {
    const Tensor3 core = random_tensor(ranks, rng);
    std::array<Matrix, 3> f;
    for (std::size_t n = 0; n < 3; ++n) f[n] = random_orthonormal(shape[n], ranks[n], rng);
    Tensor3 x(shape);
    for (std::size_t i = 0; i < shape[0]; ++i)
        for (std::size_t j = 0; j < shape[1]; ++j)
            for (std::size_t k = 0; k < shape[2]; ++k) {
                double v = 0.0;
                for (std::size_t a = 0; a < ranks[0]; ++a)
                    for (std::size_t b = 0; b < ranks[1]; ++b)
                        for (std::size_t c = 0; c < ranks[2]; ++c)
                            v += core(a, b, c) * f[0](i, a) * f[1](j, b) * f[2](k, c);
                x(i, j, k) = v;
            }
    return x;
}

}  // namespace cqd::testing
