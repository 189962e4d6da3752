// SPDX-License-Identifier: MIT
#pragma once

#include "cqd/tensor.hpp"

#include <array>

namespace cqd {

inline constexpr double kOrthonormalTol = 1e-10;
inline constexpr double kSingularTol = 1e-12;

/// n x p matrix with orthonormal columns.
class StiefelPoint {
public:
    /// Throws ArgumentError unless U^T U = I within kOrthonormalTol.
    explicit StiefelPoint(Matrix u);

    [[nodiscard]] const Matrix& matrix() const noexcept { return u_; }
    [[nodiscard]] Eigen::Index rows() const noexcept { return u_.rows(); }
    [[nodiscard]] Eigen::Index cols() const noexcept { return u_.cols(); }

private:
    Matrix u_;
};

/// G - U sym(U^T G).
Matrix tangent_project_stiefel(const StiefelPoint& u, const Matrix& g);

/// Thin QR with columns sign-corrected so diag(R) > 0. A diagonal entry of R
/// with magnitude at or below kSingularTol raises RankDeficiencyError.
StiefelPoint qr_retraction(const Matrix& y);

/// qr_retraction(U - eta * tangent_project_stiefel(U, G)).
StiefelPoint stiefel_step(const StiefelPoint& u, const Matrix& g, double eta);

/// Point on the manifold of tensors with fixed multilinear rank.
class TuckerPoint {
public:
    TuckerPoint(Tensor3 core, std::array<StiefelPoint, 3> factors);

    [[nodiscard]] const Tensor3& core() const noexcept { return core_; }
    [[nodiscard]] const std::array<StiefelPoint, 3>& factors() const noexcept { return factors_; }
    [[nodiscard]] const Matrix& factor(std::size_t mode) const { return factors_.at(mode).matrix(); }
    [[nodiscard]] Ranks3 ranks() const noexcept { return core_.shape(); }
    [[nodiscard]] Shape3 shape() const noexcept;

    /// The represented tensor in the ambient space.
    [[nodiscard]] Tensor3 to_tensor() const;

private:
    Tensor3 core_;
    std::array<StiefelPoint, 3> factors_;
};

/// Tangent vector in horizontal form: a core direction plus three factor
/// directions with U_n^T factor_dirs[n] = 0.
struct TuckerTangent {
    Tensor3 core_dir;
    std::array<Matrix, 3> factor_dirs;
};

/// Ambient embedding of a tangent vector at p.
Tensor3 embed_tangent(const TuckerPoint& p, const TuckerTangent& t);

/// Orthogonal projection of an ambient gradient onto the tangent space at p.
TuckerTangent riemannian_grad_tucker(const TuckerPoint& p, const Tensor3& euclid_grad);

/// Retraction by truncated HOSVD of p + eta * embed(t) at p's ranks.
TuckerPoint tucker_retract(const TuckerPoint& p, const TuckerTangent& t, double eta);

/// Truncated HOSVD of an ambient tensor at fixed ranks, as a TuckerPoint.
/// Throws RankDeficiencyError when a retained singular value is below
/// kSingularTol.
TuckerPoint tucker_project(const Tensor3& x, const Ranks3& ranks);

}  // namespace cqd
