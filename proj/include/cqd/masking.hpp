// SPDX-License-Identifier: MIT
#pragma once

#include "cqd/hosvd.hpp"
#include "cqd/tensor.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace cqd {

using Mask = std::vector<std::uint8_t>;

struct SpectralMaskSet {
    double eps_rel = 0.0;
    std::array<Mask, 3> masks;
    Ranks3 ranks{0, 0, 0};
};

/// Result of adaptive spectral masking. `masked` is the projected tensor in
/// the ambient space; `masked_core` and `masked_factors` are its Tucker form
/// restricted to the retained singular directions.
struct CompressedState {
    Tensor3 masked;
    Tensor3 masked_core;
    std::array<Matrix, 3> masked_factors;
    SpectralMaskSet maskset;
};

/// mask[i] = 1 iff svals[i] >= eps_rel * svals[0]. The literal rule: an
/// all-zero spectrum yields all ones here; asm_compress overrides that case.
Mask spectral_mask(const Vector& svals, double eps_rel);

/// Masks for all three modes of a factorization, with the zero-tensor rule
/// (sigma_1 == 0 gives an all-zero mask) applied.
SpectralMaskSet select_masks(const HosvdFactorization& f, double eps_rel);

CompressedState asm_compress(const Tensor3& x, double eps_rel);

/// Same as above, reusing an existing factorization of x.
CompressedState asm_compress(const Tensor3& x, const HosvdFactorization& f, double eps_rel);

/// Budget proxy: r1 * r2 * r3.
[[nodiscard]] constexpr std::uint64_t budget(const Ranks3& r) noexcept {
    return static_cast<std::uint64_t>(r[0]) * r[1] * r[2];
}

struct EpsilonControllerParams {
    double up = 1.1;
    double down = 0.9;
    double eps_min = 1e-6;
    double eps_max = 0.999;
};

/// One step of the online threshold controller: raise eps when the achieved
/// budget exceeds tau, lower it when below, keep it on equality.
double adapt_epsilon(double eps, std::uint64_t achieved_budget, std::uint64_t tau,
                     const EpsilonControllerParams& params = {});

}  // namespace cqd
