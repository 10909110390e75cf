#include "solitonforge/geometry.hpp"
#include "solitonforge/detail/hermite.hpp"
#include "solitonforge/errors.hpp"
#include "solitonforge/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace solitonforge {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

GeometryState state_from_series(const OriginSeries& s, double r) {
    GeometryState g;
    g.r = r;
    g.phi = s.phi(r);
    g.dphi = s.dphi(r);
    g.ddphi = s.ddphi(r);
    g.d3phi = s.d3phi(r);
    g.df = s.df(r);
    g.ddf = s.ddf(r);
    g.d3f = s.d3f(r);
    g.from_series = true;
    return g;
}

// Third derivatives on an exact soliton, by differentiating
//   phi'' = (1 - phi'^2)/phi - f' phi'  and  f'' = -2 phi''/phi.
void ode_third_derivatives(GeometryState& g) {
    const double omd2 = (1.0 - g.dphi) * (1.0 + g.dphi);
    g.d3phi = -2.0 * g.dphi * g.ddphi / g.phi -
              omd2 * g.dphi / (g.phi * g.phi) - g.ddf * g.dphi -
              g.df * g.ddphi;
    g.d3f = -2.0 * g.d3phi / g.phi +
            2.0 * g.ddphi * g.dphi / (g.phi * g.phi);
}

} // namespace

GeometryState geometry_state(const SolitonProfile& p, double r) {
    if (p.is_exact_soliton && r < p.r_min() && r >= 0.0)
        return state_from_series(p.origin_data, r);

    const ProfileSample s = eval_profile(p, r); // throws RangeError
    GeometryState g;
    g.r = r;
    g.phi = s.phi;
    g.dphi = s.dphi;
    g.ddphi = s.ddphi;
    g.df = s.df;
    g.ddf = s.ddf;
    g.d3phi = std::numeric_limits<double>::quiet_NaN();
    g.d3f = std::numeric_limits<double>::quiet_NaN();
    if (p.deriv_source == DerivativeSource::soliton_ode)
        ode_third_derivatives(g);
    return g;
}

CurvatureSample curvature(const SolitonProfile& p, double r) {
    const CurvatureDerivatives d = curvature_derivatives(p, r);
    return CurvatureSample{r, d.lambda, d.mu, d.R, d.dR};
}

CurvatureDerivatives curvature_derivatives(const SolitonProfile& p, double r) {
    const GeometryState g = geometry_state(p, r);
    if (!(g.phi > 0.0)) {
        std::ostringstream msg;
        msg << "curvature: phi(" << r << ") = " << g.phi << " is not positive";
        throw DomainError(msg.str());
    }

    CurvatureDerivatives out;
    curvature_from_state(g.phi, g.dphi, g.ddphi, out.lambda, out.mu, out.R);

    if (p.deriv_source == DerivativeSource::soliton_ode) {
        // Derivative route along the soliton: R' = -2 lambda f' and
        // R'' = -2 (lambda' f' + lambda f'') with lambda' = f'''.
        out.dR = -2.0 * out.lambda * g.df;
        out.d2R = -2.0 * (g.d3f * g.df + out.lambda * g.ddf);
        // Independent route: differentiate R = lambda + 2 mu directly.
        const double phi2 = g.phi * g.phi;
        const double omd2 = (1.0 - g.dphi) * (1.0 + g.dphi);
        const double dlambda =
            -2.0 * g.d3phi / g.phi + 2.0 * g.ddphi * g.dphi / phi2;
        const double dmu = -g.d3phi / g.phi + g.ddphi * g.dphi / phi2 -
                           2.0 * g.dphi * g.ddphi / phi2 -
                           2.0 * omd2 * g.dphi / (phi2 * g.phi);
        out.dR_geometric = dlambda + 2.0 * dmu;
    } else {
        const auto& xs = p.grid.nodes;
        const std::size_t i = detail::segment_index(xs, r);
        if (r == xs[i]) {
            out.dR = p.cache_dR[i];
            out.d2R = p.cache_d2R[i];
        } else if (r == xs[i + 1]) {
            out.dR = p.cache_dR[i + 1];
            out.d2R = p.cache_d2R[i + 1];
        } else {
            const auto seg =
                detail::segment_for(xs, p.cache_dR, p.cache_d2R, r);
            out.dR = seg.value(r);
            out.d2R = seg.deriv(r);
        }
        out.dR_geometric = out.dR;
    }
    return out;
}

double b_scalar(const SolitonProfile& p, double r) {
    const CurvatureDerivatives d = curvature_derivatives(p, r);
    const GeometryState g = geometry_state(p, r);
    return d.mu * g.df - 0.25 * (d.dR + 2.0 * d.R * g.df);
}

double BTensorComponents::norm_squared() const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                s += c[i][j][k] * c[i][j][k];
    return s;
}

BTensorComponents b_tensor_full(const CurvatureSample& sample,
                                double f_prime) {
    const double ric[3][3] = {{sample.lambda, 0.0, 0.0},
                              {0.0, sample.mu, 0.0},
                              {0.0, 0.0, sample.mu}};
    const double gmet[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const double gf[3] = {f_prime, 0.0, 0.0};
    const double v[3] = {sample.dR + 2.0 * sample.R * f_prime, 0.0, 0.0};

    BTensorComponents out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                out.c[i][j][k] = ric[i][k] * gf[j] - ric[i][j] * gf[k] -
                                 0.25 * (v[j] * gmet[i][k] -
                                         v[k] * gmet[i][j]);
    return out;
}

double x_radial(const SolitonProfile& p, const PsiFunction& psi_fn,
                double r) {
    const CurvatureDerivatives d = curvature_derivatives(p, r);
    const GeometryState g = geometry_state(p, r);
    if (!psi_fn.contains(d.R)) {
        std::ostringstream msg;
        msg << "x_radial: psi undefined at s = " << d.R << " (domain ["
            << psi_fn.lo << ", " << psi_fn.hi << "])";
        throw DomainError(msg.str());
    }
    return d.dR + psi_fn.value(d.R) * g.df;
}

double divergence_radial(const SolitonProfile& p, const RadialField& field,
                         double r) {
    if (!field.value || !field.deriv)
        throw UsageError("divergence_radial: field needs value and deriv");
    const GeometryState g = geometry_state(p, r);
    return field.deriv(r) + 2.0 * (g.dphi / g.phi) * field.value(r);
}

double laplacian_radial(const SolitonProfile& p, const RadialField& field,
                        double r) {
    if (!field.deriv || !field.deriv2)
        throw UsageError("laplacian_radial: field needs deriv and deriv2");
    const GeometryState g = geometry_state(p, r);
    return field.deriv2(r) + 2.0 * (g.dphi / g.phi) * field.deriv(r);
}

double sphere_flux(const SolitonProfile& p, const RadialField& field,
                   double r) {
    if (!field.value)
        throw UsageError("sphere_flux: field needs value");
    const GeometryState g = geometry_state(p, r);
    return kFourPi * g.phi * g.phi * field.value(r);
}

double ball_integral(const SolitonProfile& p, const RadialField& field,
                     double a, double b, double rel_tol, double abs_tol) {
    if (!field.value)
        throw UsageError("ball_integral: field needs value");
    const double lo = p.is_exact_soliton ? 0.0 : p.r_min();
    if (!(a < b) || a < lo || b > p.r_max()) {
        std::ostringstream msg;
        msg << "ball_integral: [" << a << ", " << b << "] outside valid ["
            << lo << ", " << p.r_max() << "]";
        throw RangeError(msg.str());
    }
    const auto integrand = [&](double r) {
        const GeometryState g = geometry_state(p, r);
        return kFourPi * g.phi * g.phi * field.value(r);
    };
    // Split at the series/interpolation boundary so each piece is smooth.
    const double r0 = p.r_min();
    if (a < r0 && b > r0)
        return integrate(integrand, a, r0, rel_tol, abs_tol) +
               integrate(integrand, r0, b, rel_tol, abs_tol);
    return integrate(integrand, a, b, rel_tol, abs_tol);
}

} // namespace solitonforge
