#pragma once

#include "solitonforge/identities.hpp"
#include "solitonforge/profile.hpp"
#include "solitonforge/psi.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace solitonforge {

// Profile CSV v1. Layout (bit-exact):
//   # soliton-forge profile v1; exact_soliton=<true|false>
//   r,phi,dphi,ddphi,df,ddf
//   <17-significant-digit rows>
void write_profile_csv(std::ostream& os, const SolitonProfile& p);
void write_profile_csv(const std::string& path, const SolitonProfile& p);
SolitonProfile read_profile_csv(std::istream& is);
SolitonProfile read_profile_csv(const std::string& path);

// psi CSV v1:
//   # soliton-forge psi v1
//   s,psi,dpsi,u
void write_psi_csv(std::ostream& os, const PsiProfile& psi);
void write_psi_csv(const std::string& path, const PsiProfile& psi);
PsiProfile read_psi_csv(std::istream& is);
PsiProfile read_psi_csv(const std::string& path);

// Report JSON v1:
//   { "version": 1, "config": {...},
//     "checks": [ {"id","max_abs","rms","n_samples","threshold","pass"} ],
//     "pass": bool }
std::string report_to_json(const VerificationReport& rep);
VerificationReport report_from_json(const std::string& text);
void write_report_json(const std::string& path, const VerificationReport& rep);
VerificationReport read_report_json(const std::string& path);

// Flat key=value configuration with a fixed key registry; unknown keys are
// rejected. Values keep their textual form until queried.
class ConfigMap {
public:
    ConfigMap(); // defaults for every known key

    static const std::vector<std::pair<std::string, std::string>>& known_keys();

    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);

    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;
    std::string get_string(const std::string& key) const;

    SolverConfig solver_config() const;
    SuiteConfig suite_config() const;

private:
    std::map<std::string, std::string> values_;
};

// CLI entry point (also used by the tests). Returns the process exit code:
// 0 all checks passed, 1 a verification check failed, 2 usage/config/IO
// error. Diagnostics go to err, results to out.
int command_dispatch(const std::vector<std::string>& args, std::ostream& out,
                     std::ostream& err);

} // namespace solitonforge
