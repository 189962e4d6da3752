// SPDX-License-Identifier: MIT
#include "cqd/manifold.hpp"

#include "cqd/errors.hpp"
#include "cqd/hosvd.hpp"

#include <Eigen/QR>
#include <cmath>
#include <string>

namespace cqd {

namespace {

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

std::array<std::size_t, 2> other_modes(std::size_t n) {
    switch (n) {
        case 0: return {1, 2};
        case 1: return {0, 2};
        default: return {0, 1};
    }
}

}  // namespace

StiefelPoint::StiefelPoint(Matrix u) : u_(std::move(u)) {
    if (u_.cols() > u_.rows()) throw ArgumentError("Stiefel point needs rows >= cols");
    const Matrix gram = u_.transpose() * u_;
    const double err = (gram - Matrix::Identity(u_.cols(), u_.cols())).cwiseAbs().maxCoeff();
    if (u_.cols() > 0 && !(err <= kOrthonormalTol)) {
        throw ArgumentError("columns are not orthonormal (max |U^T U - I| = " + std::to_string(err) + ")");
    }
}

Matrix tangent_project_stiefel(const StiefelPoint& u, const Matrix& g) {
    const Matrix& U = u.matrix();
    if (g.rows() != U.rows() || g.cols() != U.cols()) throw ArgumentError("tangent_project_stiefel: shape mismatch");
    return g - U * sym(U.transpose() * g);
}

StiefelPoint qr_retraction(const Matrix& y) {
    const Eigen::Index n = y.rows();
    const Eigen::Index p = y.cols();
    if (p > n) throw ArgumentError("qr_retraction needs rows >= cols");
    if (!y.allFinite()) throw ArgumentError("qr_retraction: non-finite input");

    Eigen::HouseholderQR<Matrix> qr(y);
    Matrix q = qr.householderQ() * Matrix::Identity(n, p);
    const Matrix& packed = qr.matrixQR();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double d = packed(j, j);
        if (std::abs(d) <= kSingularTol) {
            throw RankDeficiencyError("qr_retraction: |R(" + std::to_string(j) + "," + std::to_string(j) +
                                      ")| <= 1e-12, input is rank deficient");
        }
        if (d < 0.0) q.col(j) *= -1.0;
    }
    return StiefelPoint(std::move(q));
}

StiefelPoint stiefel_step(const StiefelPoint& u, const Matrix& g, double eta) {
    if (!(eta > 0.0)) throw ArgumentError("stiefel_step: eta must be positive");
    return qr_retraction(u.matrix() - eta * tangent_project_stiefel(u, g));
}

TuckerPoint::TuckerPoint(Tensor3 core, std::array<StiefelPoint, 3> factors)
    : core_(std::move(core)), factors_(std::move(factors)) {
    for (std::size_t n = 0; n < 3; ++n) {
        if (static_cast<std::size_t>(factors_[n].cols()) != core_.dim(n)) {
            throw ArgumentError("Tucker factor " + std::to_string(n) + " has " + std::to_string(factors_[n].cols()) +
                                " columns, core extent is " + std::to_string(core_.dim(n)));
        }
    }
}

Shape3 TuckerPoint::shape() const noexcept {
    return {static_cast<std::size_t>(factors_[0].rows()), static_cast<std::size_t>(factors_[1].rows()),
            static_cast<std::size_t>(factors_[2].rows())};
}

Tensor3 TuckerPoint::to_tensor() const {
    return tucker_to_tensor(core_, {factor(0), factor(1), factor(2)});
}

Tensor3 embed_tangent(const TuckerPoint& p, const TuckerTangent& t) {
    Tensor3 out = tucker_to_tensor(t.core_dir, {p.factor(0), p.factor(1), p.factor(2)});
    for (std::size_t n = 0; n < 3; ++n) {
        std::array<Matrix, 3> f{p.factor(0), p.factor(1), p.factor(2)};
        f[n] = t.factor_dirs[n];
        out += tucker_to_tensor(p.core(), f);
    }
    return out;
}

TuckerTangent riemannian_grad_tucker(const TuckerPoint& p, const Tensor3& euclid_grad) {
    if (euclid_grad.shape() != p.shape()) throw ArgumentError("riemannian_grad_tucker: ambient shape mismatch");

    TuckerTangent t;
    Tensor3 c = euclid_grad;
    for (std::size_t n = 0; n < 3; ++n) c = mode_n_product(c, p.factor(n).transpose(), n);
    t.core_dir = std::move(c);

    for (std::size_t n = 0; n < 3; ++n) {
        const auto [a, b] = other_modes(n);
        Tensor3 w = mode_n_product(euclid_grad, p.factor(a).transpose(), a);
        w = mode_n_product(w, p.factor(b).transpose(), b);
        const Matrix wn = unfold(w, n);
        const Matrix gn = unfold(p.core(), n);
        const Matrix& u = p.factor(n);

        // V = (I - U U^T) W_(n) G_(n)^+, with G_(n)^+ = G^T (G G^T)^-1.
        const Matrix gram = gn * gn.transpose();
        const Matrix rhs = gn * wn.transpose();
        Matrix v = gram.completeOrthogonalDecomposition().solve(rhs).transpose();
        v -= u * (u.transpose() * v);
        t.factor_dirs[n] = std::move(v);
    }
    return t;
}

TuckerPoint tucker_project(const Tensor3& x, const Ranks3& ranks) {
    std::array<Matrix, 3> lead;
    for (std::size_t n = 0; n < 3; ++n) {
        if (ranks[n] > x.dim(n)) throw ArgumentError("tucker_project: rank exceeds extent");
        const LeftSingular ls = left_singular(unfold(x, n));
        if (ranks[n] > 0 && !(ls.s(static_cast<Eigen::Index>(ranks[n]) - 1) >= kSingularTol)) {
            throw RankDeficiencyError("tucker_project: singular value " + std::to_string(ranks[n]) + " of mode " +
                                      std::to_string(n) + " is below 1e-12");
        }
        lead[n] = ls.u.leftCols(static_cast<Eigen::Index>(ranks[n]));
    }
    Tensor3 core = x;
    for (std::size_t n = 0; n < 3; ++n) core = mode_n_product(core, lead[n].transpose(), n);
    return TuckerPoint(std::move(core), {StiefelPoint(std::move(lead[0])), StiefelPoint(std::move(lead[1])),
                                         StiefelPoint(std::move(lead[2]))});
}

TuckerPoint tucker_retract(const TuckerPoint& p, const TuckerTangent& t, double eta) {
    if (!(eta > 0.0)) throw ArgumentError("tucker_retract: eta must be positive");
    Tensor3 moved = p.to_tensor();
    moved += eta * embed_tangent(p, t);
    return tucker_project(moved, p.ranks());
}

}  // namespace cqd
