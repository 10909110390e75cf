#pragma once

#include "solitonforge/identities.hpp"
#include "solitonforge/profile.hpp"
#include "solitonforge/psi.hpp"
#include "solitonforge/solver.hpp"

#include <cmath>
#include <cstddef>
#include <functional>

namespace solitonforge::test {

// One default solve / extraction shared across the whole binary.
inline const SolitonProfile& bryant() {
    static const SolitonProfile p = solve_bryant({});
    return p;
}

inline const PsiProfile& bryant_psi() {
    static const PsiProfile psi =
        extract_psi(bryant(), SGrid::make_default(bryant()));
    return psi;
}

using RealFn = std::function<double(double)>;

// Synthetic profile from closed-form phi, f' and their derivatives.
inline SolitonProfile synthetic_profile(double a, double b, std::size_t n,
                                        const RealFn& phi, const RealFn& dphi,
                                        const RealFn& ddphi, const RealFn& df,
                                        const RealFn& ddf) {
    RadialGrid grid = RadialGrid::uniform(a, b, n);
    std::vector<double> vphi(n), vdphi(n), vddphi(n), vdf(n), vddf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        vphi[i] = phi(r);
        vdphi[i] = dphi(r);
        vddphi[i] = ddphi(r);
        vdf[i] = df(r);
        vddf[i] = ddf(r);
    }
    return make_sampled_profile(std::move(grid), std::move(vphi),
                                std::move(vdphi), std::move(vddphi),
                                std::move(vdf), std::move(vddf));
}

// Flat 3-space: phi = r, f = const.
inline SolitonProfile flat_profile(double a = 1e-8, double b = 2.0,
                                   std::size_t n = 64) {
    return synthetic_profile(
        a, b, n, [](double r) { return r; }, [](double) { return 1.0; },
        [](double) { return 0.0; }, [](double) { return 0.0; },
        [](double) { return 0.0; });
}

// Round cylinder of radius c with unit potential slope.
inline SolitonProfile cylinder_profile(double c, double a = 0.5,
                                       double b = 2.5, std::size_t n = 64) {
    return synthetic_profile(
        a, b, n, [c](double) { return c; }, [](double) { return 0.0; },
        [](double) { return 0.0; }, [](double) { return 1.0; },
        [](double) { return 0.0; });
}

// Unit 3-sphere slice: phi = sin r.
inline SolitonProfile sphere_profile(double a = 0.5, double b = 2.7,
                                     std::size_t n = 65) {
    return synthetic_profile(
        a, b, n, [](double r) { return std::sin(r); },
        [](double r) { return std::cos(r); },
        [](double r) { return -std::sin(r); }, [](double) { return 0.0; },
        [](double) { return 0.0; });
}

} // namespace solitonforge::test
