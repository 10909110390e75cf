#pragma once

#include "solitonforge/profile.hpp"

#include <functional>

namespace solitonforge {

// Scalar function of r with an optional derivative chain, used for the
// divergence / Laplacian / flux operators. Fields may be empty when the
// corresponding derivative is not needed by the operator being called.
struct RadialField {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::function<double(double)> deriv2;
};

// Scalar function of s in (0,1) with derivative, used as the psi handle of
// the vector field X = grad R + psi(R) grad f. 'lo'/'hi' bound the domain.
struct PsiFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double s) const { return s >= lo && s <= hi; }
};

// Full local jet of the profile at one radius. On exact solitons radii below
// the first grid node are served from the origin series; third derivatives
// come from differentiating the ODE and are NaN for sampled profiles.
struct GeometryState {
    double r, phi, dphi, ddphi, d3phi, df, ddf, d3f;
    bool from_series = false;
};

// Curvature values plus first and second radial derivatives of R.
// 'dR' follows the profile's derivative route (-2 lambda f' on exact
// solitons, finite differences on sampled profiles); 'dR_geometric' is
// always the direct derivative of R = lambda + 2 mu, so the two routes are
// independent on exact solitons.
struct CurvatureDerivatives {
    double lambda, mu, R, dR, d2R, dR_geometric;
};

// All 27 components of the three-index tensor
//   B_ijk = Ric_ik d_j f - Ric_ij d_k f
//           - (1/4) ((d_j R + 2 R d_j f) g_ik - (d_k R + 2 R d_k f) g_ij)
// in the orthonormal frame {e_r, e_1, e_2} (g = identity).
struct BTensorComponents {
    double c[3][3][3];

    double norm_squared() const;
};

GeometryState geometry_state(const SolitonProfile& p, double r);

// lambda = -2 phi''/phi, mu = -phi''/phi + (1 - phi'^2)/phi^2, R = lambda + 2 mu.
// Throws DomainError if phi(r) <= 0.
CurvatureSample curvature(const SolitonProfile& p, double r);

CurvatureDerivatives curvature_derivatives(const SolitonProfile& p, double r);

// beta(r) = mu f' - (1/4)(R' + 2 R f'); the only nonzero frame components of
// B are B[a][r][a] = -B[a][a][r] = beta for the two spherical indices a, so
// |B|^2 = 4 beta^2.
double b_scalar(const SolitonProfile& p, double r);

// Brute-force evaluation of the 27 components from the definition; the
// oracle for b_scalar.
BTensorComponents b_tensor_full(const CurvatureSample& sample, double f_prime);

// X_r(r) = R'(r) + psi(R(r)) f'(r). Throws DomainError when R(r) is outside
// the domain of psi_fn.
double x_radial(const SolitonProfile& p, const PsiFunction& psi_fn, double r);

// div(w d_r) = w' + 2 (phi'/phi) w.
double divergence_radial(const SolitonProfile& p, const RadialField& field,
                         double r);

// Laplacian of a radial scalar: h'' + 2 (phi'/phi) h'.
double laplacian_radial(const SolitonProfile& p, const RadialField& field,
                        double r);

// Flux of w d_r through the r-sphere: 4 pi phi(r)^2 w(r).
double sphere_flux(const SolitonProfile& p, const RadialField& field,
                   double r);

// Integral of h over the annular ball {a <= r <= b}:
//   int_a^b 4 pi phi(r)^2 h(r) dr
// by adaptive quadrature. On exact solitons a may be as small as 0 (the
// integrand is evaluated from the origin series below the first node).
double ball_integral(const SolitonProfile& p, const RadialField& field,
                     double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 1e-14);

} // namespace solitonforge
