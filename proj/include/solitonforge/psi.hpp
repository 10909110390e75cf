#pragma once

#include "solitonforge/geometry.hpp"
#include "solitonforge/profile.hpp"

#include <cstddef>
#include <vector>

namespace solitonforge {

// Strictly increasing grid in (0,1) for sampling psi, clustered
// geometrically toward both endpoints (where psi is hardest to resolve).
struct SGrid {
    std::vector<double> nodes;

    // Covers [max(R_last, floor) .. min(1 - eps_top, R_first)] of the
    // profile's scalar-curvature range: n_half log-spaced nodes below 1/2
    // and n_half log-spaced values of 1-s above it.
    static SGrid make_default(const SolitonProfile& p, std::size_t n_half = 400,
                              double eps_top = 1e-4);
};

// Sampled graph of psi(s) = -R'/f' at s = R, its derivative in s, and the
// weight u(s) = log psi(s) + int_{1/2}^s (3/(2(1-t)) - 1/((1-t) psi(t))) dt.
struct PsiProfile {
    std::vector<double> s_nodes;
    std::vector<double> psi, dpsi, u;
    std::vector<double> du; // u'(s) at nodes, derived, used for interpolation
    double limit_at_one = 0.0;

    double s_min() const { return s_nodes.front(); }
    double s_max() const { return s_nodes.back(); }
};

// Least-squares fits of the endpoint behaviour of psi:
//   near s = 1:  psi ~ limit_const + slope_at_one * (1 - s)
//   near s = 0:  psi / s^2 - 1 ~ cubic_coeff * s
struct AsymptoticsFit {
    double limit_const = 0.0;
    double slope_at_one = 0.0;
    double cubic_coeff = 0.0;
    double top_fit_residual = 0.0;    // max |psi - fit| over the top window
    double bottom_fit_residual = 0.0; // max |psi/s^2 - 1 - c s| over the bottom
    std::size_t n_top = 0, n_bottom = 0;
};

// Radius with R(r(s)) = s, by bisection-bracketed Newton on the interpolated
// profile; |R(r(s)) - s| <= 1e-12. Throws RangeError when s is outside the
// range of R over the grid.
double radius_of_curvature_level(const SolitonProfile& p, double s);

// Extracts psi, psi' and u on the grid. Requires is_exact_soliton (psi is
// defined through the exact relation grad R + psi(R) grad f = 0).
PsiProfile extract_psi(const SolitonProfile& p, const SGrid& grid);

// Interpolating handle over the table (cubic Hermite on (psi, dpsi); its
// derivative is the derivative of the same cubic). Domain = the table range.
// The PsiProfile must outlive the handle.
PsiFunction psi_handle(const PsiProfile& psi);

// u by adaptive quadrature with the substitution t = 1 - tau^2 above
// t = 0.9 (the integrand is O(1/sqrt(1-t)) there by the endpoint lemma).
// psi values come from the interpolating handle.
double u_of_s(const PsiProfile& psi, double s, double rel_tol = 1e-9);

// Same quadrature for an arbitrary psi function handle (used for trial
// functions against which the flux machinery is cross-checked).
double u_of_s_fn(const PsiFunction& fn, double s, double rel_tol = 1e-9);

// Hermite interpolation of the tabulated u (slopes from the analytic
// u'(s) = psi'/psi + 3/(2(1-s)) - 1/((1-s) psi)). clamp=true evaluates the
// nearest endpoint outside the table instead of throwing.
double u_interp(const PsiProfile& psi, double s, bool clamp = false);

// Derivative of the interpolated u channel itself (used where a consumer
// differentiates u_interp along a curve).
double u_interp_prime(const PsiProfile& psi, double s);

// Analytic u'(s) from the interpolated psi:
//   u'(s) = psi'/psi + 3/(2(1-s)) - 1/((1-s) psi).
double u_prime(const PsiProfile& psi, double s);

// Residuals of the first-order ODE for psi at table nodes inside
// [window_lo, window_hi]:
//   EQ_ODE:  -3/4 psi^2 + psi - s^2 + s psi - (1-s) psi psi'
//   EQ_ODE2: the rearranged form 3/4 - 1/psi + (1-s) psi'/psi + s(s-psi)/psi^2,
//            reported rescaled by psi^2 so both live on the same scale.
std::vector<ResidualStats> psi_ode_residual(const PsiProfile& psi,
                                            double threshold,
                                            double window_lo = 0.05,
                                            double window_hi = 0.95);

AsymptoticsFit asymptotics_check(const PsiProfile& psi);

} // namespace solitonforge
