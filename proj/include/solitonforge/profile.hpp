#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace solitonforge {

// Strictly increasing radii r_i > 0. The grid is whatever the integrator
// produced; it is not assumed uniform.
struct RadialGrid {
    std::vector<double> nodes;

    std::size_t size() const { return nodes.size(); }
    double front() const { return nodes.front(); }
    double back() const { return nodes.back(); }

    static RadialGrid uniform(double a, double b, std::size_t n);
    // Midpoint-refined grid (every interval split in two).
    static RadialGrid refine(const RadialGrid& g);
};

// Coefficients of the smooth-center expansion of the rotationally symmetric
// steady soliton, normalized so the scalar curvature at the center is 1:
//   phi(r) = r + a3 r^3 + a5 r^5 + a7 r^7 + O(r^9)
//   f'(r)  = b1 r + b3 r^3 + b5 r^5 + O(r^7)
// The coefficients follow from matching orders in the profile equations
//   phi'' = (1 - phi'^2)/phi - f' phi',   f'' = -2 phi''/phi.
struct OriginSeries {
    double a3 = 0, a5 = 0, a7 = 0;
    double b1 = 0, b3 = 0, b5 = 0;

    static OriginSeries bryant();

    double phi(double r) const;
    double dphi(double r) const;
    double ddphi(double r) const;
    double d3phi(double r) const;
    double df(double r) const;
    double ddf(double r) const;
    double d3f(double r) const;
};

// How per-node derivative columns relate to the value columns.
//  soliton_ode: ddphi/ddf are the ODE right-hand side; higher derivatives
//               come from differentiating the ODE (exact solitons only).
//  sampled:     derivative columns were supplied (analytically or by finite
//               differences); higher derivatives come from finite
//               differences of the node tables.
enum class DerivativeSource { soliton_ode, sampled };

// Sampled radial profile: warp factor phi, potential derivative f' and their
// derivatives at every node. Immutable after construction by convention; all
// consumers take const references.
struct SolitonProfile {
    RadialGrid grid;
    std::vector<double> phi, dphi, ddphi; // warp factor and derivatives
    std::vector<double> df, ddf;          // f', f''
    OriginSeries origin_data;             // valid when is_exact_soliton
    bool is_exact_soliton = false;
    DerivativeSource deriv_source = DerivativeSource::sampled;
    // Bound the solver (or loader) asserts for |R + f'^2 - 1| at nodes.
    double conservation_tol = 1e-8;

    // Node tables derived once after construction (see finalize_caches):
    // scalar curvature, its radial derivatives and the Ricci eigenvalues.
    std::vector<double> cache_R, cache_dR, cache_d2R, cache_lambda, cache_mu;

    std::size_t size() const { return grid.size(); }
    double r_min() const { return grid.front(); }
    double r_max() const { return grid.back(); }
};

// Interpolated sample at one radius. 'd2phi_channel' is the second
// derivative of the phi interpolation channel itself (the derivative of the
// dphi curve); on exact solitons 'ddphi' is instead the geometric phi''
// recomputed from the profile equations, which is node-exact but not the
// literal derivative of the interpolated dphi curve.
struct ProfileSample {
    double r, phi, dphi, ddphi, df, ddf;
    double d2phi_channel;
};

// Pointwise curvature data: radial Ricci eigenvalue lambda, spherical Ricci
// eigenvalue mu (double multiplicity), scalar curvature R = lambda + 2 mu and
// its radial derivative.
struct CurvatureSample {
    double r, lambda, mu, R, dR;
};

// Summary of an identity residual over a grid; pass iff max_abs <= threshold.
struct ResidualStats {
    std::string name;
    double max_abs = 0.0;
    double rms = 0.0;
    std::size_t n_samples = 0;
    double threshold = 0.0;
    bool pass = false;

    static ResidualStats from_values(std::string name,
                                     const std::vector<double>& values,
                                     double threshold);
};

struct Violation {
    std::string invariant;
    std::size_t node; // index into the grid
    double magnitude;
};

// Scalar curvature and Ricci eigenvalues from node values alone:
//   lambda = -2 phi''/phi,  mu = -phi''/phi + (1 - phi'^2)/phi^2.
// 1 - phi'^2 is computed as (1 - phi')(1 + phi') to avoid cancellation where
// phi' is close to 1.
void curvature_from_state(double phi, double dphi, double ddphi,
                          double& lambda, double& mu, double& R);

// Right-hand side of the profile system: given (phi, phi', f') returns
// phi'' and f''.
void soliton_rhs(double phi, double dphi, double df, double& ddphi,
                 double& ddf);

// Fills cache_* tables. Must be called once after the sample columns are
// set; the construction helpers below do this themselves.
void finalize_caches(SolitonProfile& p);

// Profile with per-node derivative columns supplied by the caller.
SolitonProfile make_sampled_profile(RadialGrid grid, std::vector<double> phi,
                                    std::vector<double> dphi,
                                    std::vector<double> ddphi,
                                    std::vector<double> df,
                                    std::vector<double> ddf);

// Cubic-Hermite interpolation of the stored columns; exact at nodes.
// Throws RangeError outside [r_min, r_max].
ProfileSample eval_profile(const SolitonProfile& p, double r);

// Every violated invariant with node index and magnitude; empty means valid.
std::vector<Violation> validate_profile(const SolitonProfile& p);

// Resample onto a new grid (must lie within the old range). Exact solitons
// keep the ODE derivative source; the conservation bound is re-measured.
SolitonProfile resample(const SolitonProfile& p, const RadialGrid& grid);

} // namespace solitonforge
