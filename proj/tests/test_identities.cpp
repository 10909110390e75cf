#include "fixtures.hpp"
#include "solitonforge/errors.hpp"
#include "solitonforge/identities.hpp"
#include "solitonforge/io.hpp"

#include <doctest.h>

#include <cmath>

using namespace solitonforge;
using namespace solitonforge::test;

namespace {

PsiFunction trial_half() {
    return PsiFunction{[](double s) { return 0.5 * s; },
                       [](double) { return 0.5; }, 0.0, 1.0};
}

PsiFunction trial_const() {
    return PsiFunction{[](double) { return 2.0 / 3.0; },
                       [](double) { return 0.0; }, 0.0, 1.0};
}

PsiFunction trial_square() {
    return PsiFunction{[](double s) { return s * s; },
                       [](double s) { return 2.0 * s; }, 0.0, 1.0};
}

} // namespace

TEST_CASE("pointwise identities hold on the solved profile") {
    const SolitonProfile& p = bryant();
    const PsiContext none = PsiContext::none();
    CHECK(identity_residual(p, none, IdentityId::EQ_GRAD_R, 1e-8).pass);
    CHECK(identity_residual(p, none, IdentityId::EQ_LAP_R, 1e-6).pass);
    CHECK(identity_residual(p, none, IdentityId::EQ_B_NORM, 1e-6).pass);
}

TEST_CASE("the general identity holds for arbitrary trial functions") {
    const SolitonProfile& p = bryant();
    for (const PsiFunction& fn :
         {trial_half(), trial_const(), trial_square()}) {
        const ResidualStats s = identity_residual(
            p, PsiContext::from_trial(fn), IdentityId::EQ_GENERAL, 1e-6);
        CHECK(s.pass);
        CHECK(s.max_abs <= 1e-6);
    }
}

TEST_CASE("simplified and weighted identities hold with the extracted psi") {
    const SolitonProfile& p = bryant();
    const PsiContext ctx = PsiContext::from_table(bryant_psi());
    const ResidualStats s7 =
        identity_residual(p, ctx, IdentityId::EQ_SIMPLIFIED, 1e-6);
    const ResidualStats s8 =
        identity_residual(p, ctx, IdentityId::EQ_FINAL, 1e-6);
    CHECK(s7.pass);
    CHECK(s8.pass);
}

TEST_CASE("identities requiring psi reject a missing table") {
    const SolitonProfile& p = bryant();
    CHECK_THROWS_AS(identity_residual(p, PsiContext::none(),
                                      IdentityId::EQ_SIMPLIFIED, 1e-6),
                    UsageError);
    CHECK_THROWS_AS(identity_residual(p, PsiContext::none(),
                                      IdentityId::EQ_GENERAL, 1e-6),
                    UsageError);
}

TEST_CASE("the simplified identity is the general one minus the psi ODE") {
    const SolitonProfile& p = bryant();
    const PsiProfile& psi = bryant_psi();
    const PsiFunction fn = psi_handle(psi);

    double worst_gap = 0.0, worst6 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double R = p.cache_R[i];
        if (R < 0.02 || R > 0.98)
            continue;
        const double pv = fn.value(R), pd = fn.deriv(R);
        const double df = p.df[i], ddf = p.ddf[i];
        const double X = p.cache_dR[i] + pv * df;
        const double dX = p.cache_d2R[i] + pd * p.cache_dR[i] * df + pv * ddf;
        const double divX = dX + 2.0 * (p.dphi[i] / p.phi[i]) * X;
        const double beta =
            p.cache_mu[i] * df - 0.25 * (p.cache_dR[i] + 2.0 * R * df);
        const double B2 = 4.0 * beta * beta;
        const double omr = 1.0 - R;
        const double res5 =
            omr * divX -
            (-B2 - 0.75 * (p.cache_dR[i] - pv * df) * X - df * X +
             omr * pd * df * X - 0.75 * omr * pv * pv + omr * pv - R * R * omr +
             R * omr * pv - omr * omr * pv * pd);
        const double res7 =
            omr * divX - (-B2 - 0.75 * (p.cache_dR[i] - pv * df) * X -
                          df * X + omr * pd * df * X);
        const double res6 =
            -0.75 * pv * pv + pv - R * R + R * pv - (1.0 - R) * pv * pd;
        // res7 drops exactly the ODE terms: res5 - res7 = -(1-R) res6
        worst_gap = std::max(worst_gap,
                             std::abs((res5 - res7) + omr * res6));
        worst6 = std::max(worst6, std::abs(res6));
    }
    CHECK(worst_gap <= 1e-13);

    const ResidualStats s5 = identity_residual(
        bryant(), PsiContext::from_trial(fn), IdentityId::EQ_GENERAL, 1e-6);
    const ResidualStats s7 = identity_residual(
        bryant(), PsiContext::from_table(psi), IdentityId::EQ_SIMPLIFIED,
        1e-6);
    CHECK(std::abs(s5.max_abs - s7.max_abs) <= 10.0 * worst6 + 1e-12);
}

TEST_CASE("identity residuals respond linearly to a profile perturbation") {
    const SolitonProfile& p = bryant();
    PerturbationSpec spec;
    spec.delta = 0.01;
    const SolitonProfile pert = perturb(p, spec);
    spec.delta = 0.005;
    const SolitonProfile pert_half = perturb(p, spec);

    const ResidualStats clean =
        identity_residual(p, PsiContext::none(), IdentityId::EQ_GRAD_R, 1e-6);
    const ResidualStats full = identity_residual(
        pert, PsiContext::none(), IdentityId::EQ_GRAD_R, 1e-6);
    const ResidualStats half = identity_residual(
        pert_half, PsiContext::none(), IdentityId::EQ_GRAD_R, 1e-6);

    CHECK(clean.pass);
    CHECK_FALSE(full.pass);
    CHECK(full.max_abs > 1e-3);
    const double ratio = full.max_abs / half.max_abs;
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.5);
}

TEST_CASE("perturbation with zero amplitude only resamples") {
    const SolitonProfile& p = bryant();
    PerturbationSpec spec;
    spec.delta = 0.0;
    const SolitonProfile q = perturb(p, spec);
    CHECK_FALSE(q.is_exact_soliton);
    for (double r : {1.0, 3.0, 10.0, 40.0}) {
        const ProfileSample a = eval_profile(p, r);
        const ProfileSample b = eval_profile(q, r);
        CHECK(std::abs(a.phi - b.phi) <= 1e-9 * (1.0 + std::abs(a.phi)));
        CHECK(std::abs(a.df - b.df) <= 1e-9);
    }
}

TEST_CASE("a bump on f' wakes the b tensor up") {
    const SolitonProfile& p = bryant();
    double baseline = 0.0;
    for (std::size_t i = 0; i < p.size(); i += 5)
        baseline = std::max(baseline, std::abs(b_scalar(p, p.grid.nodes[i])));

    PerturbationSpec spec;
    spec.delta = 0.01;
    const SolitonProfile pert = perturb(p, spec);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < pert.size(); ++i)
        worst = std::max(worst, std::abs(b_scalar(pert, pert.grid.nodes[i])));
    CHECK(worst > 1e-4);
    CHECK(worst > 100.0 * baseline);

    spec.delta = 0.005;
    const SolitonProfile pert_half = perturb(p, spec);
    double worst_half = 0.0;
    for (std::size_t i = 2; i + 2 < pert_half.size(); ++i)
        worst_half = std::max(worst_half,
                              std::abs(b_scalar(pert_half,
                                                pert_half.grid.nodes[i])));
    const double ratio = worst / worst_half;
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.5);
}

TEST_CASE("a perturbed profile fails conservation") {
    PerturbationSpec spec;
    spec.delta = 0.01;
    const SolitonProfile pert = perturb(bryant(), spec);
    CHECK_FALSE(first_integral_defect(pert).pass);
}

TEST_CASE("perturbation that kills the warp factor is rejected") {
    PerturbationSpec spec;
    spec.target = PerturbationSpec::Target::phi;
    spec.delta = -1.5;
    CHECK_THROWS_AS(perturb(bryant(), spec), ConfigError);
}

TEST_CASE("weighted flux is tiny where the weight is representable") {
    const SolitonProfile& p = bryant();
    const PsiProfile& psi = bryant_psi();
    for (double r : {1.0, 2.0, 4.0, 8.0})
        CHECK(std::abs(flux_functional(p, psi, r)) <= 1e-6);
}

TEST_CASE("flux differences equal enclosed divergence for a trial weight") {
    const SolitonProfile& p = bryant();
    const PsiFunction fn = trial_half();
    const PsiProfile table = tabulate_psi_function(fn, 5e-4, 0.9999, 3000);
    const RadialField w = make_weighted_x_field(p, table);
    const RadialField div{
        [&](double r) { return divergence_radial(p, w, r); }, nullptr,
        nullptr};
    const double a = 0.8, b = 6.0;
    const double vol = ball_integral(p, div, a, b);
    const double dflux = sphere_flux(p, w, b) - sphere_flux(p, w, a);
    CHECK(std::abs(vol - dflux) <= 1e-8 * (1.0 + std::abs(dflux)));
}

TEST_CASE("the weighted integral inequality holds at moderate radii") {
    const SolitonProfile& p = bryant();
    const PsiProfile& psi = bryant_psi();
    const DivInequalityResult d5 = div_inequality_check(p, psi, 5.0);
    CHECK(std::abs(d5.lhs) <= 1e-6);
    CHECK(std::abs(d5.rhs) <= 1e-6);
    CHECK(d5.lhs <= d5.rhs + 1e-6);

    // lhs is a nonnegative, nondecreasing function of the radius
    double prev = -1.0;
    for (double r : {1.0, 2.0, 5.0}) {
        const DivInequalityResult d = div_inequality_check(p, psi, r);
        CHECK(d.lhs >= 0.0);
        CHECK(d.lhs >= prev);
        prev = d.lhs;
    }
}

TEST_CASE("the inequality integrand stays bounded toward the center") {
    const SolitonProfile& p = bryant();
    const PsiProfile& psi = bryant_psi();
    for (double r : {1e-5, 1e-4, 1e-3, 1e-2}) {
        const CurvatureDerivatives c = curvature_derivatives(p, r);
        const GeometryState g = geometry_state(p, r);
        const double beta = c.mu * g.df - 0.25 * (c.dR + 2.0 * c.R * g.df);
        const double eu = std::exp(u_interp(psi, c.R, /*clamp=*/true));
        const double integrand = eu / (1.0 - c.R) * 4.0 * beta * beta;
        CHECK(std::isfinite(integrand));
        CHECK(std::abs(integrand) < 1e-12);
    }
}

TEST_CASE("default suite: every well-posed check passes") {
    const SuiteConfig cfg;
    const VerificationReport rep = run_suite(cfg);
    REQUIRE(rep.checks.size() == 15);
    for (const auto& c : rep.checks) {
        if (c.name == "FLUX_DECAY") {
            // e^{u(R)} grows like e^{1/R}; the ladder's outer radii multiply
            // the noise floor of X beyond any tolerance (see README).
            CHECK_FALSE(c.pass);
        } else if (c.name == "DIV_INEQUALITY") {
            // rhs = -flux is the same weight-amplified noise at its largest
            // radius; the verdict is a sign flip, so only sanity is checked.
            CHECK(std::abs(c.max_abs) < 0.1);
        } else {
            INFO(c.name);
            CHECK(c.pass);
        }
    }
    CHECK_FALSE(rep.pass);
    CHECK(rep.find("FALSIFICATION") != nullptr);
    CHECK(rep.find("FALSIFICATION")->pass);
}

TEST_CASE("suite structure is stable under loosened tolerances") {
    SuiteConfig loose;
    loose.solver.rel_tol = 1e-6;
    loose.solver.abs_tol = 1e-9;
    const VerificationReport rep = run_suite(loose);
    const VerificationReport ref = run_suite(SuiteConfig{});
    REQUIRE(rep.checks.size() == ref.checks.size());
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
        const auto& a = rep.checks[i];
        const auto& b = ref.checks[i];
        CHECK(a.name == b.name);
        // The weight-amplified checks are sign-of-noise coin flips at loose
        // tolerance, and the falsification block compares a fixed-size
        // perturbation against the scaled thresholds; every well-posed
        // check keeps its verdict.
        if (a.name == "FLUX_DECAY" || a.name == "DIV_INEQUALITY" ||
            a.name == "FALSIFICATION")
            continue;
        INFO(a.name);
        CHECK(a.pass == b.pass);
    }
}

TEST_CASE("report JSON round-trips exactly") {
    const VerificationReport rep = run_suite(SuiteConfig{});
    const std::string text = report_to_json(rep);
    const VerificationReport back = report_from_json(text);
    CHECK(back.version == rep.version);
    REQUIRE(back.checks.size() == rep.checks.size());
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
        CHECK(back.checks[i].name == rep.checks[i].name);
        CHECK(back.checks[i].max_abs == rep.checks[i].max_abs);
        CHECK(back.checks[i].rms == rep.checks[i].rms);
        CHECK(back.checks[i].n_samples == rep.checks[i].n_samples);
        CHECK(back.checks[i].threshold == rep.checks[i].threshold);
        CHECK(back.checks[i].pass == rep.checks[i].pass);
    }
    CHECK(back.pass == rep.pass);
    // determinism: a second run serializes to the same bytes
    CHECK(report_to_json(run_suite(SuiteConfig{})) == text);
}
