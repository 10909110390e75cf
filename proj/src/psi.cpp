#include "solitonforge/psi.hpp"
#include "solitonforge/detail/hermite.hpp"
#include "solitonforge/errors.hpp"
#include "solitonforge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace solitonforge {

namespace {

// log-spaced values from a to b inclusive (a, b > 0)
std::vector<double> log_spaced(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    const double la = std::log(a), lb = std::log(b);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(la + (lb - la) * static_cast<double>(i) /
                                   static_cast<double>(n - 1));
    out.front() = a;
    out.back() = b;
    return out;
}

double u_integrand(const PsiFunction& fn, double t) {
    return 3.0 / (2.0 * (1.0 - t)) - 1.0 / ((1.0 - t) * fn.value(t));
}

} // namespace

SGrid SGrid::make_default(const SolitonProfile& p, std::size_t n_half,
                          double eps_top) {
    if (n_half < 8)
        throw ConfigError("SGrid: need at least 8 nodes per half");
    const double r_first = p.cache_R.front();
    const double r_last = p.cache_R.back();
    // Stay strictly inside the range of R so every node can be located by
    // root-finding on the profile.
    const double lo = r_last * (1.0 + 1e-9);
    const double hi = std::min(1.0 - eps_top, r_first * (1.0 - 1e-12));
    if (!(lo < 0.5 && 0.5 < hi))
        throw ConfigError("SGrid: profile curvature range does not span 1/2");

    SGrid g;
    const auto lower = log_spaced(lo, 0.5, n_half);
    auto upper = log_spaced(0.5, 1.0 - hi, n_half); // values of 1 - s
    g.nodes = lower;
    for (std::size_t i = 1; i < upper.size(); ++i)
        g.nodes.push_back(1.0 - upper[i]);
    return g;
}

double radius_of_curvature_level(const SolitonProfile& p, double s) {
    const auto& R = p.cache_R;
    if (s > R.front() || s < R.back()) {
        std::ostringstream msg;
        msg << "radius_of_curvature_level: s = " << s << " outside R range ["
            << R.back() << ", " << R.front() << "]";
        throw RangeError(msg.str());
    }
    // R is strictly decreasing; bracket by binary search.
    std::size_t lo = 0, hi = R.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (R[mid] >= s)
            lo = mid;
        else
            hi = mid;
    }
    if (R[lo] == s)
        return p.grid.nodes[lo];
    if (R[hi] == s)
        return p.grid.nodes[hi];

    double a = p.grid.nodes[lo], b = p.grid.nodes[hi];
    double x = 0.5 * (a + b);
    double best_x = x, best_f = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        const CurvatureDerivatives c = curvature_derivatives(p, x);
        const double f = c.R - s;
        if (std::abs(f) < best_f) {
            best_f = std::abs(f);
            best_x = x;
        }
        if (std::abs(f) <= 1e-14)
            return x;
        if (f > 0.0)
            a = x; // R too large: move outward
        else
            b = x;
        double step = f / c.dR; // Newton (dR < 0)
        double xn = x - step;
        if (!(xn > a && xn < b))
            xn = 0.5 * (a + b); // bisection fallback
        x = xn;
    }
    // Interpolated R carries evaluation noise near ulp(1)/phi'; the best
    // iterate is acceptable as long as it meets the documented bound.
    if (best_f <= 1e-12)
        return best_x;
    throw AccuracyError("radius_of_curvature_level: no convergence");
}

PsiProfile extract_psi(const SolitonProfile& p, const SGrid& grid) {
    if (!p.is_exact_soliton)
        throw UsageError("extract_psi: profile is not an exact soliton");
    for (std::size_t i = 1; i < p.cache_R.size(); ++i)
        if (!(p.cache_R[i] < p.cache_R[i - 1]))
            throw UsageError("extract_psi: R is not strictly decreasing");

    PsiProfile out;
    const std::size_t n = grid.nodes.size();
    out.s_nodes = grid.nodes;
    out.psi.resize(n);
    out.dpsi.resize(n);
    out.u.resize(n);
    out.du.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double s = grid.nodes[i];
        const double r = radius_of_curvature_level(p, s);
        const CurvatureDerivatives c = curvature_derivatives(p, r);
        const GeometryState g = geometry_state(p, r);
        // psi(s) = -R'/f' at r(s); psi'(s) by the chain rule through r.
        out.psi[i] = -c.dR / g.df;
        const double dpsi_dr =
            -(c.d2R * g.df - c.dR * g.ddf) / (g.df * g.df);
        out.dpsi[i] = dpsi_dr / c.dR;
    }

    // Extrapolated value at s = 1: linear in (1-s) through the two topmost
    // nodes (the half-power coefficient vanishes for any solution of the
    // psi ODE that is continuous at (1, 2/3)).
    {
        const double s1 = out.s_nodes[n - 1], s2 = out.s_nodes[n - 2];
        const double p1 = out.psi[n - 1], p2 = out.psi[n - 2];
        const double sig1 = 1.0 - s1, sig2 = 1.0 - s2;
        out.limit_at_one = p1 + (p1 - p2) * sig1 / (sig2 - sig1);
    }

    // u at the nodes by quadrature over the interpolated table.
    const PsiFunction handle = psi_handle(out);
    for (std::size_t i = 0; i < n; ++i) {
        out.u[i] = u_of_s_fn(handle, out.s_nodes[i]);
        const double s = out.s_nodes[i];
        out.du[i] = out.dpsi[i] / out.psi[i] +
                    (1.5 - 1.0 / out.psi[i]) / (1.0 - s);
    }
    return out;
}

PsiFunction psi_handle(const PsiProfile& psi) {
    PsiFunction fn;
    fn.lo = psi.s_min();
    fn.hi = psi.s_max();
    const PsiProfile* tab = &psi;
    fn.value = [tab](double s) {
        const std::size_t i = detail::segment_index(tab->s_nodes, s);
        if (s == tab->s_nodes[i])
            return tab->psi[i];
        if (s == tab->s_nodes[i + 1])
            return tab->psi[i + 1];
        return detail::segment_for(tab->s_nodes, tab->psi, tab->dpsi, s)
            .value(s);
    };
    fn.deriv = [tab](double s) {
        const std::size_t i = detail::segment_index(tab->s_nodes, s);
        if (s == tab->s_nodes[i])
            return tab->dpsi[i];
        if (s == tab->s_nodes[i + 1])
            return tab->dpsi[i + 1];
        return detail::segment_for(tab->s_nodes, tab->psi, tab->dpsi, s)
            .deriv(s);
    };
    return fn;
}

double u_of_s_fn(const PsiFunction& fn, double s, double rel_tol) {
    if (!fn.contains(s)) {
        std::ostringstream msg;
        msg << "u_of_s: s = " << s << " outside psi domain [" << fn.lo << ", "
            << fn.hi << "]";
        throw RangeError(msg.str());
    }
    const double base = 0.5;
    const double split = 0.9;
    double integral = 0.0;
    const auto plain = [&fn](double t) { return u_integrand(fn, t); };
    if (s <= split) {
        integral = integrate(plain, base, s, rel_tol, 1e-14);
    } else {
        integral = integrate(plain, base, split, rel_tol, 1e-14);
        // t = 1 - tau^2 neutralizes an integrable 1/sqrt(1-t) endpoint:
        // dt = -2 tau dtau and (1-t) = tau^2.
        const auto transformed = [&fn](double tau) {
            const double t = 1.0 - tau * tau;
            return (3.0 - 2.0 / fn.value(t)) / tau;
        };
        const double tau_hi = std::sqrt(1.0 - split);
        const double tau_lo = std::sqrt(1.0 - s);
        integral += integrate(transformed, tau_lo, tau_hi, rel_tol, 1e-14);
    }
    return std::log(fn.value(s)) + integral;
}

double u_of_s(const PsiProfile& psi, double s, double rel_tol) {
    return u_of_s_fn(psi_handle(psi), s, rel_tol);
}

double u_interp(const PsiProfile& psi, double s, bool clamp) {
    if (s < psi.s_min() || s > psi.s_max()) {
        if (!clamp) {
            std::ostringstream msg;
            msg << "u_interp: s = " << s << " outside table range ["
                << psi.s_min() << ", " << psi.s_max() << "]";
            throw RangeError(msg.str());
        }
        s = std::clamp(s, psi.s_min(), psi.s_max());
    }
    const std::size_t i = detail::segment_index(psi.s_nodes, s);
    if (s == psi.s_nodes[i])
        return psi.u[i];
    if (s == psi.s_nodes[i + 1])
        return psi.u[i + 1];
    return detail::segment_for(psi.s_nodes, psi.u, psi.du, s).value(s);
}

double u_interp_prime(const PsiProfile& psi, double s) {
    if (s < psi.s_min() || s > psi.s_max()) {
        std::ostringstream msg;
        msg << "u_interp_prime: s = " << s << " outside table range";
        throw RangeError(msg.str());
    }
    const std::size_t i = detail::segment_index(psi.s_nodes, s);
    if (s == psi.s_nodes[i])
        return psi.du[i];
    if (s == psi.s_nodes[i + 1])
        return psi.du[i + 1];
    return detail::segment_for(psi.s_nodes, psi.u, psi.du, s).deriv(s);
}

double u_prime(const PsiProfile& psi, double s) {
    const PsiFunction fn = psi_handle(psi);
    const double v = fn.value(s);
    return fn.deriv(s) / v + (1.5 - 1.0 / v) / (1.0 - s);
}

std::vector<ResidualStats> psi_ode_residual(const PsiProfile& psi,
                                            double threshold,
                                            double window_lo,
                                            double window_hi) {
    std::vector<double> res6, res9_scaled;
    for (std::size_t i = 0; i < psi.s_nodes.size(); ++i) {
        const double s = psi.s_nodes[i];
        if (s < window_lo || s > window_hi)
            continue;
        const double v = psi.psi[i], d = psi.dpsi[i];
        const double r6 =
            -0.75 * v * v + v - s * s + s * v - (1.0 - s) * v * d;
        const double r9 = 0.75 - 1.0 / v + (1.0 - s) * d / v +
                          s * (s - v) / (v * v);
        res6.push_back(r6);
        res9_scaled.push_back(r9 * v * v);
    }
    std::vector<ResidualStats> out;
    out.push_back(ResidualStats::from_values("EQ_ODE", res6, threshold));
    out.push_back(ResidualStats::from_values("EQ_ODE2", res9_scaled,
                                             10.0 * threshold));
    return out;
}

AsymptoticsFit asymptotics_check(const PsiProfile& psi) {
    if (psi.s_min() > 1e-3 * (1.0 + 1e-9) || psi.s_max() < 1.0 - 1e-3)
        throw ConfigError(
            "asymptotics_check: grid must reach within 1e-3 of both endpoints");

    AsymptoticsFit fit;

    // Top window: linear least squares psi = A + B sigma, sigma = 1 - s.
    {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < psi.s_nodes.size(); ++i) {
            const double sig = 1.0 - psi.s_nodes[i];
            if (sig < 1e-4 * (1.0 - 1e-12) || sig > 0.03)
                continue;
            sw += 1.0;
            sx += sig;
            sy += psi.psi[i];
            sxx += sig * sig;
            sxy += sig * psi.psi[i];
            ++n;
        }
        if (n < 8)
            throw ConfigError("asymptotics_check: too few nodes near s = 1");
        const double det = sw * sxx - sx * sx;
        fit.limit_const = (sxx * sy - sx * sxy) / det;
        fit.slope_at_one = (sw * sxy - sx * sy) / det; // coefficient of (1-s)
        fit.n_top = n;
        for (std::size_t i = 0; i < psi.s_nodes.size(); ++i) {
            const double sig = 1.0 - psi.s_nodes[i];
            if (sig < 1e-4 * (1.0 - 1e-12) || sig > 0.03)
                continue;
            const double model = fit.limit_const + fit.slope_at_one * sig;
            fit.top_fit_residual = std::max(fit.top_fit_residual,
                                            std::abs(psi.psi[i] - model));
        }
    }

    // Bottom window: psi/s^2 - 1 = c s through the origin.
    {
        double sxx = 0, sxy = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < psi.s_nodes.size(); ++i) {
            const double s = psi.s_nodes[i];
            if (s > 0.012)
                continue;
            const double y = psi.psi[i] / (s * s) - 1.0;
            sxx += s * s;
            sxy += s * y;
            ++n;
        }
        if (n < 8)
            throw ConfigError("asymptotics_check: too few nodes near s = 0");
        fit.cubic_coeff = sxy / sxx;
        fit.n_bottom = n;
        for (std::size_t i = 0; i < psi.s_nodes.size(); ++i) {
            const double s = psi.s_nodes[i];
            if (s > 0.012)
                continue;
            const double y = psi.psi[i] / (s * s) - 1.0;
            fit.bottom_fit_residual = std::max(
                fit.bottom_fit_residual, std::abs(y - fit.cubic_coeff * s));
        }
    }
    return fit;
}

} // namespace solitonforge
