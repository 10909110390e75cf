#include "solitonforge/errors.hpp"
#include "solitonforge/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

namespace solitonforge {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_report(const VerificationReport& rep, std::ostream& out) {
    out << "check             max_abs        rms            n      threshold  "
           "verdict\n";
    for (const auto& c : rep.checks) {
        char line[160];
        std::snprintf(line, sizeof line, "%-16s  %-13.6g  %-13.6g  %-6zu %-9.3g"
                                         "  %s\n",
                      c.name.c_str(), c.max_abs, c.rms, c.n_samples,
                      c.threshold, c.pass ? "PASS" : "FAIL");
        out << line;
    }
    out << "overall: " << (rep.pass ? "PASS" : "FAIL") << "\n";
}

struct CommonOpts {
    std::optional<std::string> config_file;
    std::vector<std::pair<std::string, std::string>> overrides;
};

ConfigMap build_config(const CommonOpts& opts) {
    ConfigMap cfg;
    if (opts.config_file)
        cfg.load_file(*opts.config_file);
    for (const auto& [k, v] : opts.overrides)
        cfg.set(k, v);
    return cfg;
}

// Numeric flags map onto config keys; flag values are validated as numbers
// at parse time so malformed input is a usage error.
void add_numeric_flag(CLI::App* cmd, CommonOpts& opts, const std::string& flag,
                      const std::string& key, const std::string& desc) {
    cmd->add_option_function<double>(
           flag,
           [&opts, key](double v) {
               opts.overrides.emplace_back(key, fmt(v));
           },
           desc)
        ->check(CLI::Number);
}

} // namespace

int command_dispatch(const std::vector<std::string>& args, std::ostream& out,
                     std::ostream& err) {
    CLI::App app{"numerical laboratory for the 3-d rotationally symmetric "
                 "steady gradient Ricci soliton"};
    app.name("soliton-forge");
    app.require_subcommand(1);

    CommonOpts opts;
    std::string out_path, report_path, profile_path, psi_path, radii_arg,
        target_arg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_file,
                        "flat key=value configuration file");
        add_numeric_flag(cmd, opts, "--seed-radius", "solver.seed_radius",
                         "series handover radius");
        add_numeric_flag(cmd, opts, "--rel-tol", "solver.rel_tol",
                         "integrator relative tolerance");
        add_numeric_flag(cmd, opts, "--abs-tol", "solver.abs_tol",
                         "integrator absolute tolerance");
        add_numeric_flag(cmd, opts, "--stop-curvature",
                         "solver.stop_curvature",
                         "integrate until R drops below this");
        add_numeric_flag(cmd, opts, "--max-radius", "solver.max_radius",
                         "hard cap on the integration radius");
        add_numeric_flag(cmd, opts, "--sgrid-half-nodes", "sgrid.half_nodes",
                         "s-grid nodes per half");
        add_numeric_flag(cmd, opts, "--eps-top", "sgrid.eps_top",
                         "distance of the top s-grid node from 1");
    };

    CLI::App* solve = app.add_subcommand("solve", "construct the soliton "
                                                  "profile and emit its CSV");
    add_common(solve);
    solve->add_option("--out", out_path, "output CSV path");

    CLI::App* psi = app.add_subcommand("psi", "extract the psi table and emit "
                                              "its CSV");
    add_common(psi);
    psi->add_option("--profile", profile_path, "input profile CSV (default: "
                                               "solve internally)");
    psi->add_option("--out", out_path, "output CSV path");

    CLI::App* verify = app.add_subcommand("verify", "run the verification "
                                                    "suite and emit a report");
    add_common(verify);
    verify->add_option("--profile", profile_path,
                       "profile CSV to verify (default: solve internally)");
    verify->add_option("--report", report_path, "report JSON path");

    CLI::App* perturb_cmd = app.add_subcommand("perturb", "emit a perturbed "
                                                          "profile CSV");
    add_common(perturb_cmd);
    perturb_cmd->add_option("--profile", profile_path,
                            "input profile CSV (default: solve internally)");
    perturb_cmd->add_option("--target", target_arg,
                            "field to perturb: df or phi");
    add_numeric_flag(perturb_cmd, opts, "--delta", "perturb.delta",
                     "bump amplitude");
    add_numeric_flag(perturb_cmd, opts, "--center", "perturb.center",
                     "bump center radius (0 = where R = 1/2)");
    add_numeric_flag(perturb_cmd, opts, "--width", "perturb.width",
                     "bump width");
    add_numeric_flag(perturb_cmd, opts, "--spacing", "perturb.spacing",
                     "uniform resample spacing");
    perturb_cmd->add_option("--out", out_path, "output CSV path");

    CLI::App* flux = app.add_subcommand("flux", "print the weighted flux over "
                                                "a list of radii");
    add_common(flux);
    flux->add_option("--profile", profile_path, "input profile CSV");
    flux->add_option("--psi-table", psi_path, "input psi CSV");
    flux->add_option("--radii", radii_arg, "comma-separated radius list");

    std::vector<std::string> argv_s = args;
    argv_s.insert(argv_s.begin(), "soliton-forge");
    std::vector<const char*> argv;
    for (const auto& s : argv_s)
        argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        ConfigMap cfg = build_config(opts);
        if (!target_arg.empty())
            cfg.set("perturb.target", target_arg);
        if (!radii_arg.empty())
            cfg.set("flux.radii", radii_arg);

        auto load_or_solve = [&](bool deep) {
            if (!profile_path.empty())
                return read_profile_csv(profile_path);
            SolverConfig sc = cfg.solver_config();
            if (deep) {
                // cover the configured flux radii (R ~ 1/r)
                double needed = 0.0;
                for (double r : cfg.suite_config().flux_radii)
                    needed = std::max(needed, 1.02 * r);
                SolitonProfile p = solve_bryant(sc);
                for (int k = 0; k < 4 && p.r_max() < needed; ++k) {
                    sc.stop_curvature *= 0.9 * p.r_max() / needed;
                    p = solve_bryant(sc);
                }
                return p;
            }
            return solve_bryant(sc);
        };

        if (solve->parsed()) {
            const SolitonProfile p = solve_bryant(cfg.solver_config());
            const std::string path =
                out_path.empty() ? cfg.get_string("paths.profile") : out_path;
            write_profile_csv(path, p);
            const ResidualStats d = first_integral_defect(p);
            out << "profile: " << p.size() << " nodes, r in ["
                << fmt(p.r_min()) << ", " << fmt(p.r_max())
                << "], conservation defect " << fmt(d.max_abs) << " -> "
                << path << "\n";
            return 0;
        }

        if (psi->parsed()) {
            const SolitonProfile p = load_or_solve(false);
            const SGrid grid = SGrid::make_default(
                p, static_cast<std::size_t>(cfg.get_long("sgrid.half_nodes")),
                cfg.get_double("sgrid.eps_top"));
            const PsiProfile table = extract_psi(p, grid);
            const std::string path =
                out_path.empty() ? cfg.get_string("paths.psi") : out_path;
            write_psi_csv(path, table);
            out << "psi table: " << table.s_nodes.size() << " nodes, s in ["
                << fmt(table.s_min()) << ", " << fmt(table.s_max())
                << "], limit at 1 = " << fmt(table.limit_at_one) << " -> "
                << path << "\n";
            return 0;
        }

        if (verify->parsed()) {
            const SuiteConfig suite = cfg.suite_config();
            VerificationReport rep;
            if (!profile_path.empty()) {
                const SolitonProfile p = read_profile_csv(profile_path);
                rep = run_suite(suite, &p);
            } else {
                rep = run_suite(suite);
            }
            const std::string path = report_path.empty()
                                         ? cfg.get_string("paths.report")
                                         : report_path;
            write_report_json(path, rep);
            print_report(rep, out);
            out << "report -> " << path << "\n";
            return rep.pass ? 0 : 1;
        }

        if (perturb_cmd->parsed()) {
            const SolitonProfile p = load_or_solve(false);
            PerturbationSpec spec;
            const std::string target = cfg.get_string("perturb.target");
            if (target == "df")
                spec.target = PerturbationSpec::Target::df;
            else if (target == "phi")
                spec.target = PerturbationSpec::Target::phi;
            else
                throw ConfigError("perturb.target must be df or phi, got '" +
                                  target + "'");
            spec.delta = cfg.get_double("perturb.delta");
            spec.center = cfg.get_double("perturb.center");
            spec.width = cfg.get_double("perturb.width");
            spec.spacing = cfg.get_double("perturb.spacing");
            const SolitonProfile q = perturb(p, spec);
            const std::string path = out_path.empty()
                                         ? cfg.get_string("paths.perturbed")
                                         : out_path;
            write_profile_csv(path, q);
            out << "perturbed profile: " << q.size() << " nodes, delta = "
                << fmt(spec.delta) << " on " << target << " -> " << path
                << "\n";
            return 0;
        }

        if (flux->parsed()) {
            const SolitonProfile p = load_or_solve(true);
            PsiProfile table;
            if (!psi_path.empty()) {
                table = read_psi_csv(psi_path);
            } else {
                if (!p.is_exact_soliton)
                    throw UsageError("flux: psi table required for a "
                                     "non-soliton profile (--psi-table)");
                const SGrid grid = SGrid::make_default(
                    p,
                    static_cast<std::size_t>(cfg.get_long("sgrid.half_nodes")),
                    cfg.get_double("sgrid.eps_top"));
                table = extract_psi(p, grid);
            }
            out << "r,flux\n";
            for (double r : cfg.suite_config().flux_radii) {
                const double F = flux_functional(p, table, r);
                out << fmt(r) << ',' << fmt(F) << "\n";
            }
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace solitonforge
