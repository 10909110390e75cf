#include "solitonforge/profile.hpp"
#include "solitonforge/detail/fd_weights.hpp"
#include "solitonforge/detail/hermite.hpp"
#include "solitonforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace solitonforge {

RadialGrid RadialGrid::uniform(double a, double b, std::size_t n) {
    RadialGrid g;
    g.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.nodes[i] = a + (b - a) * static_cast<double>(i) /
                             static_cast<double>(n - 1);
    g.nodes.back() = b;
    return g;
}

RadialGrid RadialGrid::refine(const RadialGrid& g) {
    RadialGrid out;
    out.nodes.reserve(2 * g.nodes.size() - 1);
    for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
        out.nodes.push_back(g.nodes[i]);
        out.nodes.push_back(0.5 * (g.nodes[i] + g.nodes[i + 1]));
    }
    out.nodes.push_back(g.nodes.back());
    return out;
}

OriginSeries OriginSeries::bryant() {
    OriginSeries s;
    s.a3 = -1.0 / 36.0;
    s.a5 = 29.0 / 21600.0;
    s.a7 = (157.0 * s.a3 * s.a5 - 117.0 * s.a3 * s.a3 * s.a3) / 49.0;
    s.b1 = 1.0 / 3.0;
    s.b3 = -2.0 / 135.0;
    s.b5 = 23.0 / 28350.0;
    return s;
}

double OriginSeries::phi(double r) const {
    const double r2 = r * r;
    return r * (1.0 + r2 * (a3 + r2 * (a5 + r2 * a7)));
}

double OriginSeries::dphi(double r) const {
    const double r2 = r * r;
    return 1.0 + r2 * (3.0 * a3 + r2 * (5.0 * a5 + r2 * 7.0 * a7));
}

double OriginSeries::ddphi(double r) const {
    const double r2 = r * r;
    return r * (6.0 * a3 + r2 * (20.0 * a5 + r2 * 42.0 * a7));
}

double OriginSeries::d3phi(double r) const {
    const double r2 = r * r;
    return 6.0 * a3 + r2 * (60.0 * a5 + r2 * 210.0 * a7);
}

double OriginSeries::df(double r) const {
    const double r2 = r * r;
    return r * (b1 + r2 * (b3 + r2 * b5));
}

double OriginSeries::ddf(double r) const {
    const double r2 = r * r;
    return b1 + r2 * (3.0 * b3 + r2 * 5.0 * b5);
}

double OriginSeries::d3f(double r) const {
    const double r2 = r * r;
    return r * (6.0 * b3 + r2 * 20.0 * b5);
}

void curvature_from_state(double phi, double dphi, double ddphi,
                          double& lambda, double& mu, double& R) {
    const double one_minus_dphi2 = (1.0 - dphi) * (1.0 + dphi);
    lambda = -2.0 * ddphi / phi;
    mu = -ddphi / phi + one_minus_dphi2 / (phi * phi);
    R = lambda + 2.0 * mu;
}

void soliton_rhs(double phi, double dphi, double df, double& ddphi,
                 double& ddf) {
    const double one_minus_dphi2 = (1.0 - dphi) * (1.0 + dphi);
    ddphi = one_minus_dphi2 / phi - df * dphi;
    ddf = -2.0 * ddphi / phi;
}

ResidualStats ResidualStats::from_values(std::string name,
                                         const std::vector<double>& values,
                                         double threshold) {
    ResidualStats s;
    s.name = std::move(name);
    s.threshold = threshold;
    s.n_samples = values.size();
    double sq = 0.0;
    for (double v : values) {
        // Overflowed residuals (products with e^{u} can exceed the double
        // range) are clamped to DBL_MAX; they fail any finite threshold.
        const double a = std::isfinite(v) ? std::abs(v)
                                          : std::numeric_limits<double>::max();
        s.max_abs = std::max(s.max_abs, a);
        sq += std::min(a * a, std::numeric_limits<double>::max());
    }
    s.rms = values.empty()
                ? 0.0
                : std::sqrt(std::min(sq / values.size(),
                                     std::numeric_limits<double>::max()));
    s.pass = s.max_abs <= threshold;
    return s;
}

void finalize_caches(SolitonProfile& p) {
    const std::size_t n = p.size();
    p.cache_R.resize(n);
    p.cache_lambda.resize(n);
    p.cache_mu.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        curvature_from_state(p.phi[i], p.dphi[i], p.ddphi[i], p.cache_lambda[i],
                             p.cache_mu[i], p.cache_R[i]);

    if (p.deriv_source == DerivativeSource::soliton_ode) {
        // dR = -2 lambda f' along a profile that satisfies the system; the
        // second derivative follows by the chain rule through the ODE.
        p.cache_dR.resize(n);
        p.cache_d2R.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double lam = p.cache_lambda[i];
            p.cache_dR[i] = -2.0 * lam * p.df[i];
            const double phi = p.phi[i];
            const double dphi = p.dphi[i];
            const double ddphi = p.ddphi[i];
            const double df = p.df[i];
            const double ddf = p.ddf[i];
            const double omd2 = (1.0 - dphi) * (1.0 + dphi);
            const double d3phi = -2.0 * dphi * ddphi / phi -
                                 omd2 * dphi / (phi * phi) - ddf * dphi -
                                 df * ddphi;
            const double d3f =
                -2.0 * d3phi / phi + 2.0 * ddphi * dphi / (phi * phi);
            p.cache_d2R[i] = -2.0 * (d3f * df + lam * ddf);
        }
    } else {
        p.cache_dR = detail::derivative_table(p.grid.nodes, p.cache_R);
        p.cache_d2R = detail::derivative_table(p.grid.nodes, p.cache_dR);
    }
}

SolitonProfile make_sampled_profile(RadialGrid grid, std::vector<double> phi,
                                    std::vector<double> dphi,
                                    std::vector<double> ddphi,
                                    std::vector<double> df,
                                    std::vector<double> ddf) {
    SolitonProfile p;
    p.grid = std::move(grid);
    p.phi = std::move(phi);
    p.dphi = std::move(dphi);
    p.ddphi = std::move(ddphi);
    p.df = std::move(df);
    p.ddf = std::move(ddf);
    p.is_exact_soliton = false;
    p.deriv_source = DerivativeSource::sampled;
    const std::size_t n = p.grid.size();
    if (p.phi.size() != n || p.dphi.size() != n || p.ddphi.size() != n ||
        p.df.size() != n || p.ddf.size() != n)
        throw UsageError("make_sampled_profile: column lengths do not match grid");
    finalize_caches(p);
    return p;
}

ProfileSample eval_profile(const SolitonProfile& p, double r) {
    const auto& xs = p.grid.nodes;
    if (r < xs.front() || r > xs.back()) {
        std::ostringstream msg;
        msg << "eval_profile: r = " << r << " outside [" << xs.front() << ", "
            << xs.back() << "]";
        throw RangeError(msg.str());
    }

    const std::size_t i = detail::segment_index(xs, r);
    detail::HermiteSegment phi_seg{xs[i],      xs[i + 1],  p.phi[i],
                                   p.phi[i + 1], p.dphi[i], p.dphi[i + 1]};
    if (r == xs[i])
        return ProfileSample{r,         p.phi[i], p.dphi[i],        p.ddphi[i],
                             p.df[i],   p.ddf[i], phi_seg.second(r)};
    if (r == xs[i + 1])
        return ProfileSample{r,           p.phi[i + 1],  p.dphi[i + 1],
                             p.ddphi[i + 1], p.df[i + 1], p.ddf[i + 1],
                             phi_seg.second(r)};

    // phi and f' are each interpolated from their (value, derivative) pair;
    // the reported first derivatives are the exact derivatives of those
    // cubics, which keeps phi/phi' (and f'/f'') mutually consistent for the
    // divergence-theorem style cross-checks.
    detail::HermiteSegment df_seg{xs[i],       xs[i + 1], p.df[i],
                                  p.df[i + 1], p.ddf[i],  p.ddf[i + 1]};

    ProfileSample out;
    out.r = r;
    out.phi = phi_seg.value(r);
    out.dphi = phi_seg.deriv(r);
    out.df = df_seg.value(r);
    out.ddf = df_seg.deriv(r);
    out.d2phi_channel = phi_seg.second(r);
    if (p.deriv_source == DerivativeSource::soliton_ode) {
        double ddphi, ddf_ode;
        soliton_rhs(out.phi, out.dphi, out.df, ddphi, ddf_ode);
        out.ddphi = ddphi;
    } else {
        detail::HermiteSegment dphi_seg{xs[i],          xs[i + 1],
                                        p.dphi[i],      p.dphi[i + 1],
                                        p.ddphi[i],     p.ddphi[i + 1]};
        out.ddphi = dphi_seg.deriv(r);
    }
    return out;
}

std::vector<Violation> validate_profile(const SolitonProfile& p) {
    std::vector<Violation> out;
    const auto& xs = p.grid.nodes;
    const std::size_t n = xs.size();

    if (n < 16)
        out.push_back({"grid has at least 16 nodes", 0,
                       static_cast<double>(n)});
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(xs[i]) || xs[i] <= 0.0)
            out.push_back({"grid nodes finite and positive", i, xs[i]});
        if (i > 0 && xs[i] <= xs[i - 1])
            out.push_back({"grid strictly increasing", i, xs[i] - xs[i - 1]});
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(p.phi[i] > 0.0))
            out.push_back({"phi > 0", i, p.phi[i]});

    if (p.is_exact_soliton && out.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            double lam, mu, R;
            curvature_from_state(p.phi[i], p.dphi[i], p.ddphi[i], lam, mu, R);
            const double defect = (R - 1.0) + p.df[i] * p.df[i];
            if (std::abs(defect) > p.conservation_tol)
                out.push_back({"R + f'^2 = 1 (conservation)", i, defect});
            if (i > 0) {
                double lam0, mu0, R0;
                curvature_from_state(p.phi[i - 1], p.dphi[i - 1],
                                     p.ddphi[i - 1], lam0, mu0, R0);
                if (!(R < R0))
                    out.push_back({"R strictly decreasing", i, R - R0});
                if (!(p.df[i] > p.df[i - 1]))
                    out.push_back({"f' strictly increasing", i,
                                   p.df[i] - p.df[i - 1]});
            }
            if (!(p.df[i] > 0.0 && p.df[i] < 1.0))
                out.push_back({"f' in (0, 1)", i, p.df[i]});
        }
    }
    return out;
}

SolitonProfile resample(const SolitonProfile& p, const RadialGrid& grid) {
    if (grid.front() < p.r_min() || grid.back() > p.r_max())
        throw RangeError("resample: target grid outside the profile range");

    SolitonProfile out;
    out.grid = grid;
    const std::size_t n = grid.size();
    out.phi.resize(n);
    out.dphi.resize(n);
    out.ddphi.resize(n);
    out.df.resize(n);
    out.ddf.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ProfileSample s = eval_profile(p, grid.nodes[i]);
        out.phi[i] = s.phi;
        out.dphi[i] = s.dphi;
        out.df[i] = s.df;
        out.ddf[i] = s.ddf;
        if (p.deriv_source == DerivativeSource::soliton_ode) {
            double ddphi, ddf;
            soliton_rhs(s.phi, s.dphi, s.df, ddphi, ddf);
            out.ddphi[i] = ddphi;
            out.ddf[i] = ddf;
        } else {
            out.ddphi[i] = s.ddphi;
        }
    }
    out.origin_data = p.origin_data;
    out.is_exact_soliton = p.is_exact_soliton;
    out.deriv_source = p.deriv_source;
    finalize_caches(out);

    if (out.is_exact_soliton) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double defect =
                (out.cache_R[i] - 1.0) + out.df[i] * out.df[i];
            worst = std::max(worst, std::abs(defect));
        }
        out.conservation_tol = std::max(p.conservation_tol, 2.0 * worst);
    } else {
        out.conservation_tol = p.conservation_tol;
    }
    return out;
}

} // namespace solitonforge
