#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace solitonforge::detail {

// Fornberg finite-difference weights: given stencil abscissae xs and an
// evaluation point z, fills w[k][j] with the weight of xs[j] in the
// approximation of the k-th derivative, for k = 0..m.
// B. Fornberg, "Generation of finite difference formulas on arbitrarily
// spaced grids", Math. Comp. 51 (1988).
template <std::size_t N, std::size_t M>
inline void fd_weights(const std::array<double, N>& xs, double z,
                       std::array<std::array<double, N>, M + 1>& w) {
    double c1 = 1.0;
    double c4 = xs[0] - z;
    for (auto& row : w)
        row.fill(0.0);
    w[0][0] = 1.0;
    for (std::size_t i = 1; i < N; ++i) {
        const std::size_t mn = i < M ? i : M;
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    w[k][i] = c1 * (k * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                w[k][j] = (c4 * w[k][j] - k * w[k - 1][j]) / c3;
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
}

// First derivative of sampled data on a (possibly nonuniform) grid using
// 5-point stencils, 4th order in the interior.
inline std::vector<double> derivative_table(const std::vector<double>& xs,
                                            const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t s = i < 2 ? 0 : i - 2;
        if (s + 5 > n)
            s = n - 5;
        std::array<double, 5> x{}, dummy{};
        for (std::size_t j = 0; j < 5; ++j)
            x[j] = xs[s + j];
        (void)dummy;
        std::array<std::array<double, 5>, 2> w{};
        fd_weights<5, 1>(x, xs[i], w);
        double d = 0.0;
        for (std::size_t j = 0; j < 5; ++j)
            d += w[1][j] * ys[s + j];
        out[i] = d;
    }
    return out;
}

} // namespace solitonforge::detail
