#pragma once

#include "solitonforge/geometry.hpp"
#include "solitonforge/profile.hpp"
#include "solitonforge/psi.hpp"
#include "solitonforge/solver.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace solitonforge {

enum class IdentityId {
    EQ_GRAD_R,    // R' + 2 lambda f' = 0
    EQ_LAP_R,     // Lap R + 2 |Ric|^2 + <grad f, grad R> = 0
    EQ_B_NORM,    // |B|^2 = -(1-R) Lap R - 3/4 |grad R|^2 - <grad f,grad R> - R^2 (1-R)
    EQ_GENERAL,   // the (1-R) div X identity for an arbitrary trial psi
    EQ_ODE,       // first-order ODE satisfied by the extracted psi
    EQ_SIMPLIFIED,// the div X identity once the ODE terms cancel
    EQ_FINAL,     // weighted identity for div(e^{u(R)} X)
    EQ_ODE2,      // rearranged psi ODE used by the inequality argument
    FLUX_DECAY,
    DIV_INEQUALITY,
};

const char* to_string(IdentityId id);
IdentityId identity_from_string(const std::string& name);

// psi data for identity evaluation: an extracted table, a closed-form trial
// function, or nothing (for the identities that do not involve psi).
struct PsiContext {
    const PsiProfile* table = nullptr;
    const PsiFunction* trial = nullptr;

    static PsiContext none() { return {}; }
    static PsiContext from_table(const PsiProfile& t) { return {&t, nullptr}; }
    static PsiContext from_trial(const PsiFunction& f) { return {nullptr, &f}; }
};

// Gaussian bump perturbation applied multiplicatively to one sample field on
// a uniform resample of the profile.
struct PerturbationSpec {
    enum class Target { df, phi };
    Target target = Target::df;
    double delta = 0.01;
    double center = 0.0; // 0 = automatic (the radius where R = 1/2)
    double width = 1.0;
    double spacing = 0.04; // uniform resample step
};

// Pointwise residual of one identity over the profile nodes whose scalar
// curvature lies in [window_R_lo, window_R_hi] (for EQ_ODE / EQ_ODE2 the
// window is in s and defaults to [0.05, 0.95]).
ResidualStats identity_residual(const SolitonProfile& p, const PsiContext& psi,
                                IdentityId id, double threshold,
                                double window_lo = 0.02,
                                double window_hi = 0.98);

// The vector field X = grad R + psi(R) grad f as a radial field with
// derivative, and the flux-weighted field e^{u(R)} X.
RadialField make_x_field(const SolitonProfile& p, const PsiFunction& psi_fn);
RadialField make_weighted_x_field(const SolitonProfile& p,
                                  const PsiProfile& psi);

// Trial-psi table over [lo, hi]: psi/psi' from the handle, u by quadrature.
PsiProfile tabulate_psi_function(const PsiFunction& fn, double lo, double hi,
                                 std::size_t n = 400);

// 4 pi phi(r)^2 e^{u(R(r))} X_r(r) with the extracted psi and u.
double flux_functional(const SolitonProfile& p, const PsiProfile& psi,
                       double r);

struct DivInequalityResult {
    double lhs; // integral of e^{u(R)}/(1-R) |B|^2 over the ball of radius r
    double rhs; // -flux_functional(r)
};

// Both sides of the weighted integral inequality over the ball {0 < rho <= r}.
DivInequalityResult div_inequality_check(const SolitonProfile& p,
                                         const PsiProfile& psi, double r);

// Applies the bump; derivative columns are rebuilt by finite differences on
// the uniform resample and the result carries is_exact_soliton = false.
SolitonProfile perturb(const SolitonProfile& p, const PerturbationSpec& spec);

struct SuiteConfig {
    SolverConfig solver;
    std::size_t sgrid_half = 400;   // nodes per half of the s-grid
    double eps_top = 1e-4;
    double window_R_lo = 0.02, window_R_hi = 0.98;
    double ode_window_lo = 0.05, ode_window_hi = 0.95;
    double thr_pointwise = 1e-6;
    double thr_integral = 1e-6;
    double u_cauchy_tol = 1e-3;
    double perturb_delta = 0.01;
    std::vector<double> flux_radii = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512,
                                      1024};
    std::vector<double> div_ineq_radii = {1, 5, 20};

    // Residual thresholds scale linearly with the solver tolerance.
    double scale() const { return solver.rel_tol / 1e-10; }
    double pointwise() const { return thr_pointwise * scale(); }
    double integral() const { return thr_integral * scale(); }
};

struct VerificationReport {
    int version = 1;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<ResidualStats> checks;
    bool pass = false;

    const ResidualStats* find(const std::string& name) const;
};

// Runs the whole verification battery. When no profile is supplied the
// Bryant profile is solved internally (integrating far enough to cover the
// flux radii). A supplied non-soliton profile is checked against the psi
// table of an internally solved Bryant profile; the psi-only checks then
// describe that reference table.
VerificationReport run_suite(const SuiteConfig& config,
                             const SolitonProfile* external = nullptr);

} // namespace solitonforge
