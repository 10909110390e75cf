#include "solitonforge/io.hpp"
#include "solitonforge/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace solitonforge {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& tok, std::size_t line_no) {
    const char* s = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0') {
        std::ostringstream msg;
        msg << "line " << line_no << ": not a number: '" << tok << "'";
        throw ParseError(msg.str());
    }
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r')
        s.pop_back();
    return s;
}

constexpr const char* kProfileHeader = "r,phi,dphi,ddphi,df,ddf";
constexpr const char* kPsiHeader = "s,psi,dpsi,u";

} // namespace

void write_profile_csv(std::ostream& os, const SolitonProfile& p) {
    os << "# soliton-forge profile v1; exact_soliton="
       << (p.is_exact_soliton ? "true" : "false") << "\n"
       << kProfileHeader << "\n";
    for (std::size_t i = 0; i < p.size(); ++i)
        os << fmt17(p.grid.nodes[i]) << ',' << fmt17(p.phi[i]) << ','
           << fmt17(p.dphi[i]) << ',' << fmt17(p.ddphi[i]) << ','
           << fmt17(p.df[i]) << ',' << fmt17(p.ddf[i]) << "\n";
}

void write_profile_csv(const std::string& path, const SolitonProfile& p) {
    std::ofstream os(path);
    if (!os)
        throw ParseError("cannot open for writing: " + path);
    write_profile_csv(os, p);
}

SolitonProfile read_profile_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(is, line))
        throw ParseError("line 1: empty profile file");
    line = strip_cr(line);
    ++line_no;
    const std::string prefix = "# soliton-forge profile v1; exact_soliton=";
    if (line.rfind(prefix, 0) != 0)
        throw ParseError("line 1: missing profile format comment");
    const std::string flag = line.substr(prefix.size());
    if (flag != "true" && flag != "false")
        throw ParseError("line 1: exact_soliton must be true or false");
    const bool exact = flag == "true";

    if (!std::getline(is, line) || strip_cr(line) != kProfileHeader)
        throw ParseError("line 2: expected header '" +
                         std::string(kProfileHeader) + "'");
    ++line_no;

    SolitonProfile p;
    while (std::getline(is, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto toks = split_csv(line);
        if (toks.size() != 6) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected 6 columns, got "
                << toks.size();
            throw ParseError(msg.str());
        }
        const double r = parse_double(toks[0], line_no);
        if (!p.grid.nodes.empty() && r <= p.grid.nodes.back()) {
            std::ostringstream msg;
            msg << "line " << line_no << ": nodes not increasing (r = " << r
                << ")";
            throw ParseError(msg.str());
        }
        p.grid.nodes.push_back(r);
        p.phi.push_back(parse_double(toks[1], line_no));
        p.dphi.push_back(parse_double(toks[2], line_no));
        p.ddphi.push_back(parse_double(toks[3], line_no));
        p.df.push_back(parse_double(toks[4], line_no));
        p.ddf.push_back(parse_double(toks[5], line_no));
    }
    if (p.grid.size() < 2)
        throw ParseError("profile needs at least 2 nodes");

    p.is_exact_soliton = exact;
    p.deriv_source = exact ? DerivativeSource::soliton_ode
                           : DerivativeSource::sampled;
    if (exact)
        p.origin_data = OriginSeries::bryant();
    p.conservation_tol = 1e-8; // representation-level default for files
    finalize_caches(p);
    return p;
}

SolitonProfile read_profile_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open: " + path);
    return read_profile_csv(is);
}

void write_psi_csv(std::ostream& os, const PsiProfile& psi) {
    os << "# soliton-forge psi v1\n" << kPsiHeader << "\n";
    for (std::size_t i = 0; i < psi.s_nodes.size(); ++i)
        os << fmt17(psi.s_nodes[i]) << ',' << fmt17(psi.psi[i]) << ','
           << fmt17(psi.dpsi[i]) << ',' << fmt17(psi.u[i]) << "\n";
}

void write_psi_csv(const std::string& path, const PsiProfile& psi) {
    std::ofstream os(path);
    if (!os)
        throw ParseError("cannot open for writing: " + path);
    write_psi_csv(os, psi);
}

PsiProfile read_psi_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line) || strip_cr(line) != "# soliton-forge psi v1")
        throw ParseError("line 1: missing psi format comment");
    ++line_no;
    if (!std::getline(is, line) || strip_cr(line) != kPsiHeader)
        throw ParseError("line 2: expected header '" + std::string(kPsiHeader) +
                         "'");
    ++line_no;

    PsiProfile psi;
    while (std::getline(is, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto toks = split_csv(line);
        if (toks.size() != 4) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected 4 columns, got "
                << toks.size();
            throw ParseError(msg.str());
        }
        const double s = parse_double(toks[0], line_no);
        if (!psi.s_nodes.empty() && s <= psi.s_nodes.back()) {
            std::ostringstream msg;
            msg << "line " << line_no << ": nodes not increasing (s = " << s
                << ")";
            throw ParseError(msg.str());
        }
        psi.s_nodes.push_back(s);
        psi.psi.push_back(parse_double(toks[1], line_no));
        psi.dpsi.push_back(parse_double(toks[2], line_no));
        psi.u.push_back(parse_double(toks[3], line_no));
    }
    if (psi.s_nodes.size() < 4)
        throw ParseError("psi table needs at least 4 nodes");

    const std::size_t n = psi.s_nodes.size();
    psi.du.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = psi.s_nodes[i];
        psi.du[i] = psi.dpsi[i] / psi.psi[i] +
                    (1.5 - 1.0 / psi.psi[i]) / (1.0 - s);
    }
    const double s1 = psi.s_nodes[n - 1], s2 = psi.s_nodes[n - 2];
    const double p1 = psi.psi[n - 1], p2 = psi.psi[n - 2];
    psi.limit_at_one =
        p1 + (p1 - p2) * (1.0 - s1) / ((1.0 - s2) - (1.0 - s1));
    return psi;
}

PsiProfile read_psi_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open: " + path);
    return read_psi_csv(is);
}

std::string report_to_json(const VerificationReport& rep) {
    nlohmann::ordered_json j;
    j["version"] = rep.version;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.config)
        cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks) {
        nlohmann::ordered_json jc;
        jc["id"] = c.name;
        jc["max_abs"] = c.max_abs;
        jc["rms"] = c.rms;
        jc["n_samples"] = c.n_samples;
        jc["threshold"] = c.threshold;
        jc["pass"] = c.pass;
        checks.push_back(jc);
    }
    j["checks"] = checks;
    j["pass"] = rep.pass;
    return j.dump(2) + "\n";
}

VerificationReport report_from_json(const std::string& text) {
    VerificationReport rep;
    try {
        const auto j = nlohmann::ordered_json::parse(text);
        rep.version = j.at("version").get<int>();
        for (const auto& [k, v] : j.at("config").items())
            rep.config.emplace_back(k, v.get<std::string>());
        for (const auto& jc : j.at("checks")) {
            ResidualStats c;
            c.name = jc.at("id").get<std::string>();
            c.max_abs = jc.at("max_abs").get<double>();
            c.rms = jc.at("rms").get<double>();
            c.n_samples = jc.at("n_samples").get<std::size_t>();
            c.threshold = jc.at("threshold").get<double>();
            c.pass = jc.at("pass").get<bool>();
            rep.checks.push_back(c);
        }
        rep.pass = j.at("pass").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report JSON: ") + e.what());
    }
    return rep;
}

void write_report_json(const std::string& path,
                       const VerificationReport& rep) {
    std::ofstream os(path);
    if (!os)
        throw ParseError("cannot open for writing: " + path);
    os << report_to_json(rep);
}

VerificationReport read_report_json(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ParseError("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return report_from_json(ss.str());
}

// ---------------------------------------------------------------------------

const std::vector<std::pair<std::string, std::string>>& ConfigMap::known_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"solver.seed_radius", "0.001"},
        {"solver.rel_tol", "1e-10"},
        {"solver.abs_tol", "1e-12"},
        {"solver.stop_curvature", "0.001"},
        {"solver.max_radius", "10000"},
        {"solver.max_steps", "500000"},
        {"sgrid.half_nodes", "400"},
        {"sgrid.eps_top", "0.0001"},
        {"window.r_lo", "0.02"},
        {"window.r_hi", "0.98"},
        {"window.s_lo", "0.05"},
        {"window.s_hi", "0.95"},
        {"threshold.pointwise", "1e-6"},
        {"threshold.integral", "1e-6"},
        {"threshold.u_cauchy", "1e-3"},
        {"perturb.target", "df"},
        {"perturb.delta", "0.01"},
        {"perturb.center", "0"},
        {"perturb.width", "1"},
        {"perturb.spacing", "0.04"},
        {"flux.radii", "1,2,4,8,16,32,64,128,256,512,1024"},
        {"divineq.radii", "1,5,20"},
        {"paths.profile", "profile.csv"},
        {"paths.psi", "psi.csv"},
        {"paths.report", "report.json"},
        {"paths.perturbed", "perturbed.csv"},
    };
    return keys;
}

ConfigMap::ConfigMap() {
    for (const auto& [k, v] : known_keys())
        values_[k] = v;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    if (values_.find(key) == values_.end())
        throw ConfigError("unknown config key: " + key);
    values_[key] = value;
}

void ConfigMap::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = strip_cr(line);
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        const auto notspace = [](char c) { return !std::isspace(static_cast<unsigned char>(c)); };
        const auto b = std::find_if(line.begin(), line.end(), notspace);
        if (b == line.end())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected key = value";
            throw ConfigError(msg.str());
        }
        auto trim = [&](std::string s) {
            const auto b2 = std::find_if(s.begin(), s.end(), notspace);
            const auto e2 = std::find_if(s.rbegin(), s.rend(), notspace).base();
            return b2 < e2 ? std::string(b2, e2) : std::string();
        };
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

double ConfigMap::get_double(const std::string& key) const {
    const std::string& v = values_.at(key);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("config key " + key + ": not a number: '" + v + "'");
    return x;
}

long ConfigMap::get_long(const std::string& key) const {
    return static_cast<long>(get_double(key));
}

std::string ConfigMap::get_string(const std::string& key) const {
    return values_.at(key);
}

SolverConfig ConfigMap::solver_config() const {
    SolverConfig sc;
    sc.seed_radius = get_double("solver.seed_radius");
    sc.rel_tol = get_double("solver.rel_tol");
    sc.abs_tol = get_double("solver.abs_tol");
    sc.stop_curvature = get_double("solver.stop_curvature");
    sc.max_radius = get_double("solver.max_radius");
    sc.max_steps = get_long("solver.max_steps");
    return sc;
}

SuiteConfig ConfigMap::suite_config() const {
    SuiteConfig cfg;
    cfg.solver = solver_config();
    cfg.sgrid_half = static_cast<std::size_t>(get_long("sgrid.half_nodes"));
    cfg.eps_top = get_double("sgrid.eps_top");
    cfg.window_R_lo = get_double("window.r_lo");
    cfg.window_R_hi = get_double("window.r_hi");
    cfg.ode_window_lo = get_double("window.s_lo");
    cfg.ode_window_hi = get_double("window.s_hi");
    cfg.thr_pointwise = get_double("threshold.pointwise");
    cfg.thr_integral = get_double("threshold.integral");
    cfg.u_cauchy_tol = get_double("threshold.u_cauchy");
    cfg.perturb_delta = get_double("perturb.delta");

    auto parse_list = [&](const std::string& key) {
        std::vector<double> out;
        for (const auto& tok : split_csv(get_string(key))) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw ConfigError("config key " + key +
                                  ": not a radius list: '" + tok + "'");
            out.push_back(v);
        }
        return out;
    };
    cfg.flux_radii = parse_list("flux.radii");
    cfg.div_ineq_radii = parse_list("divineq.radii");
    return cfg;
}

} // namespace solitonforge
