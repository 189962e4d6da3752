// SPDX-License-Identifier: MIT
#include "cqd/masking.hpp"

#include "cqd/errors.hpp"

#include <algorithm>
#include <numeric>

namespace cqd {

namespace {

void require_eps(double eps_rel) {
    if (!(eps_rel > 0.0 && eps_rel < 1.0)) throw ArgumentError("eps_rel must lie in (0, 1)");
}

}  // namespace

Mask spectral_mask(const Vector& svals, double eps_rel) {
    require_eps(eps_rel);
    Mask mask(static_cast<std::size_t>(svals.size()), 0);
    if (svals.size() == 0) return mask;
    const double threshold = eps_rel * svals(0);
    for (Eigen::Index i = 0; i < svals.size(); ++i) mask[static_cast<std::size_t>(i)] = svals(i) >= threshold ? 1 : 0;
    return mask;
}

SpectralMaskSet select_masks(const HosvdFactorization& f, double eps_rel) {
    SpectralMaskSet set;
    set.eps_rel = eps_rel;
    for (std::size_t n = 0; n < 3; ++n) {
        const Vector& s = f.svals[n];
        if (s.size() == 0 || s(0) == 0.0) {
            // Zero tensor: nothing worth transmitting.
            set.masks[n] = Mask(static_cast<std::size_t>(s.size()), 0);
            require_eps(eps_rel);
        } else {
            set.masks[n] = spectral_mask(s, eps_rel);
        }
        set.ranks[n] = static_cast<std::size_t>(std::accumulate(set.masks[n].begin(), set.masks[n].end(), 0));
    }
    return set;
}

CompressedState asm_compress(const Tensor3& x, const HosvdFactorization& f, double eps_rel) {
    if (f.shape() != x.shape()) throw ArgumentError("factorization does not match tensor shape");
    CompressedState cs;
    cs.maskset = select_masks(f, eps_rel);
    const Ranks3& r = cs.maskset.ranks;

    for (std::size_t n = 0; n < 3; ++n)
        cs.masked_factors[n] = f.factors[n].leftCols(static_cast<Eigen::Index>(r[n]));

    cs.masked = x;
    for (std::size_t n = 0; n < 3; ++n) {
        if (r[n] == x.dim(n)) continue;  // full mask is the identity projection
        const Matrix& u = cs.masked_factors[n];
        cs.masked = mode_n_product(cs.masked, u * u.transpose(), n);
    }

    Tensor3 core = cs.masked;
    for (std::size_t n = 0; n < 3; ++n) core = mode_n_product(core, cs.masked_factors[n].transpose(), n);
    cs.masked_core = std::move(core);
    return cs;
}

CompressedState asm_compress(const Tensor3& x, double eps_rel) {
    require_eps(eps_rel);
    return asm_compress(x, hosvd(x), eps_rel);
}

double adapt_epsilon(double eps, std::uint64_t achieved_budget, std::uint64_t tau,
                     const EpsilonControllerParams& params) {
    double next = eps;
    if (achieved_budget > tau) {
        next = eps * params.up;
    } else if (achieved_budget < tau) {
        next = eps * params.down;
    }
    return std::clamp(next, params.eps_min, params.eps_max);
}

}  // namespace cqd
