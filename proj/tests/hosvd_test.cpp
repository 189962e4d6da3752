// SPDX-License-Identifier: MIT
#include "cqd/errors.hpp"
#include "cqd/hosvd.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace cqd {
namespace {

double orthonormality_error(const Matrix& u) {
    return (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

TEST(HosvdTest, RankOneOuterProduct) {
    // a, b, c unit vectors; |a o b o c|_F = 1 (scaled by 3 below).
    Vector a(3), b(4), c(2);
    a << 1, 2, 2;
    b << 1, 1, 1, 1;
    c << 3, 4;
    a /= a.norm();
    b /= b.norm();
    c /= c.norm();
    Tensor3 x({3, 4, 2});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t k = 0; k < 2; ++k) x(i, j, k) = 3.0 * a(i) * b(j) * c(k);

    const HosvdFactorization f = hosvd(x);
    EXPECT_NEAR(std::abs(f.core(0, 0, 0)), 3.0, 1e-12);
    double rest = 0.0;
    for (std::size_t i = 0; i < f.core.size(); ++i)
        if (i != 0) rest = std::max(rest, std::abs(f.core.data()[i]));
    EXPECT_LE(rest, 1e-10);
    for (std::size_t n = 0; n < 3; ++n) {
        EXPECT_NEAR(f.svals[n](0), 3.0, 1e-12);
        for (Eigen::Index i = 1; i < f.svals[n].size(); ++i) EXPECT_LE(f.svals[n](i), 1e-10);
    }
}

TEST(HosvdTest, ZeroTensor) {
    const HosvdFactorization f = hosvd(Tensor3({3, 2, 4}));
    EXPECT_EQ(f.core.squared_norm(), 0.0);
    for (std::size_t n = 0; n < 3; ++n) EXPECT_EQ(f.svals[n].cwiseAbs().maxCoeff(), 0.0);
}

TEST(HosvdTest, FullReconstructionAndOrthonormalFactors) {
    RandomStream rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const Tensor3 x = random_tensor({4, 5, 6}, rng);
        const HosvdFactorization f = hosvd(x);
        EXPECT_LE(testing::rel_error(tucker_to_tensor(f.core, f.factors), x), 1e-10);
        for (std::size_t n = 0; n < 3; ++n) {
            EXPECT_EQ(f.factors[n].rows(), static_cast<Eigen::Index>(x.dim(n)));
            EXPECT_EQ(f.factors[n].cols(), static_cast<Eigen::Index>(x.dim(n)));
            EXPECT_LE(orthonormality_error(f.factors[n]), 1e-10);
            for (Eigen::Index i = 1; i < f.svals[n].size(); ++i) EXPECT_LE(f.svals[n](i), f.svals[n](i - 1));
            EXPECT_GE(f.svals[n].minCoeff(), 0.0);
            EXPECT_NEAR(f.svals[n].squaredNorm(), x.squared_norm(), 1e-9 * x.squared_norm());
        }
    }
}

// Mode 0 of a 6x1x1 tensor has more rows than columns: singular values are
// zero-padded to the full extent.
TEST(HosvdTest, DegenerateModesArePadded) {
    RandomStream rng(22);
    const Tensor3 x = random_tensor({6, 1, 1}, rng);
    const HosvdFactorization f = hosvd(x);
    ASSERT_EQ(f.svals[0].size(), 6);
    EXPECT_NEAR(f.svals[0](0), x.norm(), 1e-12);
    EXPECT_EQ(f.svals[0].tail(5).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(orthonormality_error(f.factors[0]), 1e-10);
    EXPECT_LE(testing::rel_error(tucker_to_tensor(f.core, f.factors), x), 1e-10);
}

TEST(HosvdTest, SignConventionLargestEntryNonnegative) {
    RandomStream rng(23);
    const Tensor3 x = random_tensor({4, 3, 5}, rng);
    const HosvdFactorization f = hosvd(x);
    for (std::size_t n = 0; n < 3; ++n) {
        for (Eigen::Index c = 0; c < f.factors[n].cols(); ++c) {
            Eigen::Index arg = 0;
            f.factors[n].col(c).cwiseAbs().maxCoeff(&arg);
            EXPECT_GE(f.factors[n](arg, c), 0.0);
        }
    }
    // Negating the input flips the core, never the factors.
    const HosvdFactorization g = hosvd(-1.0 * x);
    for (std::size_t n = 0; n < 3; ++n) EXPECT_LE((f.factors[n] - g.factors[n]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TruncatedReconstructTest, FullAndZeroRanks) {
    RandomStream rng(24);
    const Tensor3 x = random_tensor({3, 4, 5}, rng);
    const HosvdFactorization f = hosvd(x);
    EXPECT_LE(testing::rel_error(truncated_reconstruct(f, {3, 4, 5}), x), 1e-10);
    const Tensor3 zero = truncated_reconstruct(f, {0, 0, 0});
    EXPECT_EQ(zero.shape(), x.shape());
    EXPECT_EQ(zero.squared_norm(), 0.0);
}

TEST(TruncatedReconstructTest, ExactMultilinearRank) {
    RandomStream rng(25);
    for (int trial = 0; trial < 5; ++trial) {
        const Tensor3 x = testing::low_rank_tensor({4, 4, 4}, {2, 2, 2}, rng);
        const HosvdFactorization f = hosvd(x);
        EXPECT_LE((truncated_reconstruct(f, {2, 2, 2}) - x).norm(), 1e-9);
    }
}

TEST(TruncatedReconstructTest, MatchesExplicitProjectors) {
    RandomStream rng(26);
    const Tensor3 x = random_tensor({4, 3, 5}, rng);
    const HosvdFactorization f = hosvd(x);
    const Ranks3 r{2, 1, 3};
    Tensor3 expected = x;
    for (std::size_t n = 0; n < 3; ++n) {
        const Matrix u = f.factors[n].leftCols(static_cast<Eigen::Index>(r[n]));
        expected = mode_n_product(expected, u * u.transpose(), n);
    }
    EXPECT_LE(testing::max_abs_diff(truncated_reconstruct(f, r), expected), 1e-12);
}

TEST(TruncatedReconstructTest, RankOutOfRange) {
    const HosvdFactorization f = hosvd(Tensor3({2, 2, 2}));
    EXPECT_THROW(truncated_reconstruct(f, {3, 1, 1}), ArgumentError);
    EXPECT_THROW(tail_energy(f, {1, 1, 3}), ArgumentError);
}

TEST(TailEnergyTest, Extremes) {
    RandomStream rng(27);
    const Tensor3 x = random_tensor({3, 4, 5}, rng);
    const HosvdFactorization f = hosvd(x);
    EXPECT_NEAR(tail_energy(f, {3, 4, 5}), 0.0, 1e-24);
    EXPECT_NEAR(tail_energy(f, {0, 0, 0}), 3.0 * x.squared_norm(), 1e-9 * x.squared_norm());
}

// Residual of truncation never exceeds the discarded spectral energy, for
// every rank triple of random tensors up to 5x5x5.
TEST(TailEnergyTest, BoundsTruncationResidualAllTriples) {
    RandomStream rng(28);
    for (int trial = 0; trial < 25; ++trial) {
        const Shape3 shape{1 + rng.next_u64() % 5, 1 + rng.next_u64() % 5, 1 + rng.next_u64() % 5};
        const Tensor3 x = random_tensor(shape, rng);
        const HosvdFactorization f = hosvd(x);
        for (std::size_t a = 0; a <= shape[0]; ++a)
            for (std::size_t b = 0; b <= shape[1]; ++b)
                for (std::size_t c = 0; c <= shape[2]; ++c) {
                    const double residual = (x - truncated_reconstruct(f, {a, b, c})).squared_norm();
                    EXPECT_LE(residual, tail_energy(f, {a, b, c}) + 1e-9);
                }
    }
}

// Top-r left singular projector beats every random rank-r projector.
TEST(ProjectorOptimalityTest, TopSubspaceBeatsRandomProjectors) {
    RandomStream rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = random_gaussian(6, 8, rng);
        const Matrix u = left_singular(a).u.leftCols(2);
        const double best = (a - u * u.transpose() * a).norm();
        for (int i = 0; i < 500; ++i) {
            const Matrix v = random_orthonormal(6, 2, rng);
            EXPECT_LT(best, (a - v * v.transpose() * a).norm());
        }
    }
}

}  // namespace
}  // namespace cqd
